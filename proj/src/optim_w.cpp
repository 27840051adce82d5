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

#include "mvicad/optim_w.hpp"

#include "mvicad/errors.hpp"
#include "mvicad/kernels.hpp"

#include <cmath>

namespace mvicad {

void validate(const LineSearchConfig& cfg) {
  if (!(cfg.rho_init > 0.0)) throw ParameterError("rho_init must be positive");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) throw ParameterError("shrink must lie in (0, 1)");
  if (cfg.max_backtracks < 0) throw ParameterError("max_backtracks must be non-negative");
  if (!(cfg.min_decrease >= 0.0)) throw ParameterError("min_decrease must be non-negative");
}

Matrix newton_direction(const Matrix& g, const Matrix& gamma) {
  const Eigen::Index p = g.rows();
  Matrix d(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    d(a, a) = -g(a, a) / (1.0 + gamma(a, a));
    for (Eigen::Index b = a + 1; b < p; ++b) {
      const double gab = gamma(a, b), gba = gamma(b, a);
      const double det = gab * gba - 1.0;
      if (det <= kBlockDetFloor) {
        d(a, b) = -g(a, b);
        d(b, a) = -g(b, a);
        continue;
      }
      // [[gab, 1], [1, gba]] (d_ab, d_ba) = -(g_ab, g_ba)
      d(a, b) = -(gba * g(a, b) - g(b, a)) / det;
      d(b, a) = -(gab * g(b, a) - g(a, b)) / det;
    }
  }
  return d;
}

LineSearchResult line_search(const Matrix& w, const Matrix& d, const LossFn& loss,
                             const LineSearchConfig& cfg) {
  validate(cfg);
  LineSearchResult out{w, 0.0, loss(w), false};
  if (!std::isfinite(out.loss)) return out;
  const Eigen::Index p = w.rows();
  double rho = cfg.rho_init;
  for (int k = 0; k <= cfg.max_backtracks; ++k, rho *= cfg.shrink) {
    const Matrix candidate = (Matrix::Identity(p, p) + rho * d) * w;
    const double value = loss(candidate);
    // A singular candidate evaluates to +inf and is rejected here.
    if (std::isfinite(value) && value < out.loss - cfg.min_decrease) {
      return {candidate, rho, value, true};
    }
  }
  return out;
}

UnmixingStep update_view_w(std::size_t i, SolverState& state, const ViewSet& views,
                           const LineSearchConfig& cfg) {
  if (i >= views.m()) throw ParameterError("view index out of range");
  const auto& x = views.views[i];
  const ViewContext ctx = view_context(i, state.params, state.aligned);
  const Matrix& w = state.params.W[i];
  log_abs_det(w, i);

  const GradHess gh = grad_hess(w, x, ctx);
  UnmixingStep step;
  step.grad_norm = gh.G.cwiseAbs().maxCoeff();
  if (step.grad_norm == 0.0) return step;

  const Matrix d = newton_direction(gh.G, gh.Gamma);
  const auto result =
      line_search(w, d, [&](const Matrix& cand) { return view_objective(cand, x, ctx); }, cfg);
  if (!result.accepted) return step;

  step.accepted = true;
  step.rho = result.rho;
  state.params.W[i] = result.W;
  SignalMatrix z, y;
  kernels::parallel::unmix(state.params.W[i], x, z);
  circular_shift_into(z, (-state.params.tau[i]).values(), y);
  state.replace_aligned(i, std::move(y));
  return step;
}

}  // namespace mvicad
