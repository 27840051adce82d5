/*
 * Copyright 2026 The MVICAD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "mvicad/optim_delay.hpp"
#include "mvicad/optim_w.hpp"
#include "mvicad/state.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mvicad {

/// whitening: symmetric whitening of every view.
/// provided: cfg.init_W as given.
/// per_view_ica: single-view ICA on each view, then sources are matched
/// (permutation, sign, lag) to a common reference to seed W and the delays.
enum class InitKind { whitening, provided, per_view_ica };

struct FitConfig {
  int tau_max = 0;
  double sigma = 1.0;
  Density density = Density::logcosh;
  int max_sweeps = 1000;
  double gtol = 1e-6;
  int delay_warmup_sweeps = 2;  ///< unmixing-only sweeps before the first delay sweep
  DelayMode mode = DelayMode::per_source;
  bool estimate_delays = true;  ///< false fixes every delay at zero
  InitKind init = InitKind::whitening;
  std::vector<Matrix> init_W;   ///< used when init == provided
  int init_sweeps = 200;        ///< single-view sweeps for per_view_ica
  /// Rotate the whitened start by a seed-drawn orthogonal matrix shared by all views.
  bool random_rotation = false;
  std::uint64_t seed = 0;
  LineSearchConfig line_search;
};

void validate(const FitConfig& cfg, const ViewSet& views);

struct FitResult {
  std::vector<Matrix> W;
  std::vector<DelayVector> tau;
  SignalMatrix shared_sources;
  bool converged = false;
  int sweeps = 0;
  std::vector<NllRecord> nll_history;
  double final_grad_norm = 0.0;
};

/// Symmetric whitening matrix C^{-1/2} of the view's second-moment matrix
/// C = X X^T / n. Throws SingularMatrixError when C is rank deficient.
Matrix whitening_matrix(const SignalMatrix& x, std::size_t view);

/// Starting point: unmixing matrices per `cfg.init`, zero delays, fresh caches.
SolverState initialize(const ViewSet& views, const FitConfig& cfg);

/// Block coordinate descent: every sweep updates W^1..W^m, then (after the
/// warmup sweeps) the delays of every view followed by recentering. Stops once
/// every relative gradient is below gtol and the last delay sweep changed
/// nothing, or after max_sweeps.
FitResult fit(const ViewSet& views, const FitConfig& cfg);

/// (1/m) sum_i T_{-tau^i}(W^i X^i).
SignalMatrix reconstruct_sources(const FitResult& result, const ViewSet& views);

}  // namespace mvicad
