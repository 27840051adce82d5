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

#include "mvicad/likelihood.hpp"

#include "mvicad/errors.hpp"
#include "mvicad/kernels.hpp"

#include <cmath>
#include <limits>

namespace mvicad {

ModelParams ModelParams::identity(std::size_t m, Eigen::Index p, Eigen::Index n) {
  ModelParams params;
  params.W.assign(m, Matrix::Identity(p, p));
  params.tau.assign(m, DelayVector::zeros(static_cast<std::size_t>(p), static_cast<int>(n)));
  return params;
}

void validate(const ModelParams& params, const ViewSet& views) {
  validate(views);
  const auto p = static_cast<std::size_t>(views.p());
  const auto n = static_cast<std::size_t>(views.n());
  if (params.W.size() != views.m()) throw DimensionError("views", views.m(), params.W.size());
  if (params.tau.size() != views.m()) throw DimensionError("views", views.m(), params.tau.size());
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma))
    throw ParameterError("sigma must be positive and finite");
  for (std::size_t i = 0; i < views.m(); ++i) {
    const auto& w = params.W[i];
    if (static_cast<std::size_t>(w.rows()) != p)
      throw DimensionError("unmixing rows", p, static_cast<std::size_t>(w.rows()));
    if (static_cast<std::size_t>(w.cols()) != p)
      throw DimensionError("unmixing cols", p, static_cast<std::size_t>(w.cols()));
    if (!w.allFinite()) throw ParameterError("unmixing matrix has non-finite entries");
    if (params.tau[i].size() != p) throw DimensionError("delays", p, params.tau[i].size());
    if (static_cast<std::size_t>(params.tau[i].period()) != n)
      throw DimensionError("delay period", n, static_cast<std::size_t>(params.tau[i].period()));
  }
}

AlignedSources aligned_sources(const ModelParams& params, const ViewSet& views) {
  validate(params, views);
  const std::size_t m = views.m();
  AlignedSources out;
  out.Y.resize(m);
  SignalMatrix z;
  for (std::size_t i = 0; i < m; ++i) {
    kernels::parallel::unmix(params.W[i], views.views[i], z);
    circular_shift_into(z, (-params.tau[i]).values(), out.Y[i]);
  }
  out.mean = out.Y.front();
  for (std::size_t i = 1; i < m; ++i) out.mean += out.Y[i];
  out.mean /= static_cast<double>(m);
  return out;
}

double alignment_residual(const AlignedSources& aligned) {
  double acc = 0.0;
  for (const auto& y : aligned.Y) acc += (y - aligned.mean).squaredNorm();
  return acc;
}

double log_abs_det(const Matrix& w, std::size_t view) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(w);
  const auto& packed = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < packed.rows(); ++k) {
    const double u = std::abs(packed(k, k));
    if (!(u > 0.0) || !std::isfinite(u)) throw SingularMatrixError("singular unmixing matrix", view);
    acc += std::log(u);
  }
  return acc;
}

double negative_log_likelihood(const ModelParams& params, const AlignedSources& aligned) {
  const double n = static_cast<double>(aligned.mean.cols());
  double logdet = 0.0;
  for (std::size_t i = 0; i < params.W.size(); ++i) logdet += log_abs_det(params.W[i], i);
  const double quad = alignment_residual(aligned);
  const double fsum = kernels::parallel::density_sum(aligned.mean, params.density);
  return -n * logdet + quad / (2.0 * params.sigma * params.sigma) + fsum;
}

double negative_log_likelihood(const ModelParams& params, const ViewSet& views) {
  return negative_log_likelihood(params, aligned_sources(params, views));
}

namespace {

// Shift from the aligned frame into view i's frame: T_{tau^i}.
ViewContext context_from_others_sum(std::size_t i, const ModelParams& params,
                                    const SignalMatrix& others_sum) {
  ViewContext ctx;
  const std::size_t m = params.m();
  ctx.m = static_cast<double>(m);
  ctx.sigma = params.sigma;
  ctx.density = params.density;
  if (m == 1) {
    ctx.others_mean = SignalMatrix::Zero(others_sum.rows(), others_sum.cols());
    return ctx;
  }
  circular_shift_into(others_sum, params.tau[i].values(), ctx.others_mean);
  ctx.others_mean /= static_cast<double>(m - 1);
  return ctx;
}

}  // namespace

ViewContext view_context(std::size_t i, const ModelParams& params, const ViewSet& views) {
  validate(params, views);
  if (i >= views.m()) throw ParameterError("view index out of range");
  SignalMatrix others = SignalMatrix::Zero(views.p(), views.n());
  SignalMatrix z, y;
  for (std::size_t j = 0; j < views.m(); ++j) {
    if (j == i) continue;
    kernels::parallel::unmix(params.W[j], views.views[j], z);
    circular_shift_into(z, (-params.tau[j]).values(), y);
    others += y;
  }
  return context_from_others_sum(i, params, others);
}

ViewContext view_context(std::size_t i, const ModelParams& params, const AlignedSources& aligned) {
  if (i >= aligned.Y.size()) throw ParameterError("view index out of range");
  const double m = static_cast<double>(aligned.Y.size());
  const SignalMatrix others = m * aligned.mean - aligned.Y[i];
  return context_from_others_sum(i, params, others);
}

double view_objective(const Matrix& w, const SignalMatrix& x, const ViewContext& ctx) {
  double logdet = 0.0;
  try {
    logdet = log_abs_det(w, 0);
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::infinity();
  }
  SignalMatrix z;
  kernels::parallel::unmix(w, x, z);
  const auto sums = kernels::parallel::loss_sums(z, ctx.others_mean, ctx.m, ctx.density);
  const double n = static_cast<double>(x.cols());
  const double quad_coef = (ctx.m - 1.0) / (2.0 * ctx.m * ctx.sigma * ctx.sigma);
  return -logdet + (quad_coef * sums.quad + sums.fsum) / n;
}

double view_loss(std::size_t i, const ModelParams& params, const ViewSet& views) {
  const auto ctx = view_context(i, params, views);
  log_abs_det(params.W[i], i);  // surface singularity with the view index
  return static_cast<double>(views.n()) * view_objective(params.W[i], views.views[i], ctx);
}

GradHess grad_hess(const Matrix& w, const SignalMatrix& x, const ViewContext& ctx) {
  SignalMatrix z;
  kernels::parallel::unmix(w, x, z);
  const auto sums = kernels::parallel::grad_sums(z, ctx.others_mean, ctx.m, ctx.density);
  const Eigen::Index p = w.rows();
  const double n = static_cast<double>(x.cols());
  const double quad_coef = (ctx.m - 1.0) / (ctx.m * ctx.sigma * ctx.sigma);

  GradHess gh;
  gh.G = (quad_coef * sums.resid_z + sums.score_z / ctx.m) / n;
  gh.G.diagonal().array() -= 1.0;

  gh.Gamma.resize(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    const double row_coef = quad_coef + sums.curv(a) / n / (ctx.m * ctx.m);
    for (Eigen::Index b = 0; b < p; ++b)
      gh.Gamma(a, b) = std::max(row_coef * sums.power(b) / n, kGammaFloor);
  }
  return gh;
}

Matrix relative_gradient(std::size_t i, const ModelParams& params, const ViewSet& views) {
  return grad_hess(params.W[i], views.views[i], view_context(i, params, views)).G;
}

Matrix hessian_coefficients(std::size_t i, const ModelParams& params, const ViewSet& views) {
  return grad_hess(params.W[i], views.views[i], view_context(i, params, views)).Gamma;
}

}  // namespace mvicad
