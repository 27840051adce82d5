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

#include "mvicad/likelihood.hpp"

#include <vector>

namespace mvicad {

struct NllRecord {
  enum class Phase { init, unmixing, delays };
  Phase phase;
  int sweep;
  double value;

  friend bool operator==(const NllRecord&, const NllRecord&) = default;
};

/// Iterate of the block coordinate descent: parameters plus the aligned
/// sources Y^i and their mean, kept consistent with the parameters.
struct SolverState {
  ModelParams params;
  AlignedSources aligned;
  std::vector<NllRecord> nll_history;
  int sweep_count = 0;

  /// Builds a state with caches computed from scratch.
  static SolverState from_params(ModelParams params, const ViewSet& views);

  /// Recomputes Y^i and the mean from the parameters.
  void refresh(const ViewSet& views);
  /// Recomputes only the mean from the cached Y^i (in view order).
  void refresh_mean();
  /// Replaces Y^i and adjusts the mean incrementally.
  void replace_aligned(std::size_t i, SignalMatrix y_new);

  double nll() const { return negative_log_likelihood(params, aligned); }
};

}  // namespace mvicad
