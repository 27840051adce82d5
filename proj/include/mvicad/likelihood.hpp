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

#include "mvicad/density.hpp"
#include "mvicad/signal.hpp"
#include "mvicad/simgen.hpp"

#include <cstddef>
#include <vector>

namespace mvicad {

/// Unmixing matrices and delays of all views, plus the likelihood settings.
struct ModelParams {
  std::vector<Matrix> W;
  std::vector<DelayVector> tau;
  double sigma = 1.0;
  Density density = Density::logcosh;

  std::size_t m() const noexcept { return W.size(); }

  /// Identity unmixing and zero delays for m views of p x n signals.
  static ModelParams identity(std::size_t m, Eigen::Index p, Eigen::Index n);
};

/// Throws if the parameters do not fit the views.
void validate(const ModelParams& params, const ViewSet& views);

/// Y^i = T_{-tau^i}(W^i X^i) and their mean.
struct AlignedSources {
  std::vector<SignalMatrix> Y;
  SignalMatrix mean;
};

AlignedSources aligned_sources(const ModelParams& params, const ViewSet& views);

/// sum_i ||Y^i - mean||^2, the delay-dependent part of the likelihood.
double alignment_residual(const AlignedSources& aligned);

/// log |det W|. Throws SingularMatrixError tagged with `view` when W is singular.
double log_abs_det(const Matrix& w, std::size_t view);

/// -sum_i n log|W^i| + 1/(2 sigma^2) sum_i ||Y^i - mean||^2 + f(mean).
double negative_log_likelihood(const ModelParams& params, const ViewSet& views);
/// Same, reusing already aligned sources.
double negative_log_likelihood(const ModelParams& params, const AlignedSources& aligned);

/// What one view's loss needs from the other views, expressed in that view's
/// own time frame: the mean of the other views' sources,
///   M^{-i} = 1/(m-1) sum_{j != i} T_{tau^i - tau^j}(W^j X^j),
/// which is zero when m = 1.
struct ViewContext {
  SignalMatrix others_mean;
  double m = 1.0;
  double sigma = 1.0;
  Density density = Density::logcosh;
};

ViewContext view_context(std::size_t i, const ModelParams& params, const ViewSet& views);
/// Builds the context from cached aligned sources instead of re-unmixing every view.
ViewContext view_context(std::size_t i, const ModelParams& params, const AlignedSources& aligned);

/// L^i / n for a candidate unmixing matrix of view i, with Z = W X:
///   -log|W| + (m-1)/(2 m sigma^2 n) ||Z - M||^2 + (1/n) f((Z + (m-1) M) / m).
/// Returns +infinity when W is singular.
double view_objective(const Matrix& w, const SignalMatrix& x, const ViewContext& ctx);

/// L^i at the current parameters, on the unnormalized scale.
double view_loss(std::size_t i, const ModelParams& params, const ViewSet& views);

/// Relative gradient and pairwise Hessian coefficients of L^i / n.
struct GradHess {
  Matrix G;
  Matrix Gamma;
};

/// Lower bound applied to every Hessian coefficient.
inline constexpr double kGammaFloor = 1e-6;

GradHess grad_hess(const Matrix& w, const SignalMatrix& x, const ViewContext& ctx);

Matrix relative_gradient(std::size_t i, const ModelParams& params, const ViewSet& views);
Matrix hessian_coefficients(std::size_t i, const ModelParams& params, const ViewSet& views);

}  // namespace mvicad
