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
#include "mvicad/state.hpp"

#include <functional>

namespace mvicad {

struct LineSearchConfig {
  double rho_init = 1.0;
  double shrink = 0.5;
  int max_backtracks = 30;
  double min_decrease = 0.0;  ///< accept when loss(new) < loss(old) - min_decrease
};

void validate(const LineSearchConfig& cfg);

/// Pairs (a, b) whose 2x2 block determinant falls below this use the gradient direction.
inline constexpr double kBlockDetFloor = 1e-6;

/// Quasi-Newton direction D = -H^{-1} G for the pairwise-block Hessian
///   H_{(a,b),(c,d)} = delta_ac delta_bd Gamma_ab + delta_ad delta_bc.
Matrix newton_direction(const Matrix& g, const Matrix& gamma);

struct LineSearchResult {
  Matrix W;
  double rho = 0.0;
  double loss = 0.0;
  bool accepted = false;
};

using LossFn = std::function<double(const Matrix&)>;

/// Backtracking on W <- (I + rho D) W until the loss strictly decreases.
/// On failure returns the original W with accepted = false.
LineSearchResult line_search(const Matrix& w, const Matrix& d, const LossFn& loss,
                             const LineSearchConfig& cfg = {});

struct UnmixingStep {
  double grad_norm = 0.0;  ///< sup-norm of the relative gradient before the step
  double rho = 0.0;
  bool accepted = false;
};

/// One quasi-Newton step on W^i with every other parameter held fixed.
/// W^i changes only if the line search finds a strict decrease of L^i;
/// the aligned-source caches are updated accordingly.
UnmixingStep update_view_w(std::size_t i, SolverState& state, const ViewSet& views,
                           const LineSearchConfig& cfg = {});

}  // namespace mvicad
