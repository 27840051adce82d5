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

#include "mvicad/solver.hpp"

#include "mvicad/errors.hpp"
#include "mvicad/kernels.hpp"
#include "mvicad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mvicad {

void validate(const FitConfig& cfg, const ViewSet& views) {
  validate(views);
  if (cfg.tau_max < 0) throw ParameterError("tau_max must be non-negative");
  if (2 * static_cast<Eigen::Index>(cfg.tau_max) >= views.n())
    throw ParameterError("tau_max must be smaller than n / 2");
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma))
    throw ParameterError("sigma must be positive and finite");
  if (cfg.max_sweeps < 0) throw ParameterError("max_sweeps must be non-negative");
  if (!(cfg.gtol > 0.0)) throw ParameterError("gtol must be positive");
  if (cfg.delay_warmup_sweeps < 0) throw ParameterError("delay_warmup_sweeps must be non-negative");
  validate(cfg.line_search);
  if (cfg.init_sweeps < 0) throw ParameterError("init_sweeps must be non-negative");
  if (cfg.init == InitKind::provided && cfg.init_W.size() != views.m())
    throw DimensionError("initial unmixing matrices", views.m(), cfg.init_W.size());
}

Matrix whitening_matrix(const SignalMatrix& x, std::size_t view) {
  const Eigen::MatrixXd cov = (x * x.transpose()) / static_cast<double>(x.cols());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw SingularMatrixError("covariance eigensolver failed", view);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || ev.minCoeff() <= 1e-12 * top)
    throw SingularMatrixError("rank-deficient covariance", view);
  const Eigen::VectorXd inv_sqrt = ev.array().rsqrt();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

// Haar-distributed orthogonal matrix.
Matrix random_orthogonal(Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(p, p);
  for (Eigen::Index r = 0; r < p; ++r)
    for (Eigen::Index c = 0; c < p; ++c) g(r, c) = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < p; ++c)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  return q;
}

// Reorders and flips the rows of w so that row perm[k] becomes sign[k] * row k.
Matrix permute_rows(const Matrix& w, const PermutationMatch& match) {
  Matrix out(w.rows(), w.cols());
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    out.row(match.perm[uk]) = static_cast<double>(match.sign[uk]) * w.row(k);
  }
  return out;
}

// Per-view ICA, then two matching passes: against view 0 with a doubled lag
// window (relative delays span up to 2 tau_max), then against the aligned mean.
ModelParams per_view_ica_start(const ViewSet& views, const FitConfig& cfg) {
  const std::size_t m = views.m();
  const Eigen::Index p = views.p();
  const int n = static_cast<int>(views.n());
  ModelParams params = ModelParams::identity(m, p, n);
  params.sigma = cfg.sigma;
  params.density = cfg.density;

  FitConfig single;
  single.density = cfg.density;
  single.max_sweeps = cfg.init_sweeps;
  single.gtol = cfg.gtol;
  single.estimate_delays = false;
  single.line_search = cfg.line_search;
  std::vector<SignalMatrix> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    ViewSet one;
    one.views.push_back(views.views[i]);
    params.W[i] = fit(one, single).W.front();
    z[i] = params.W[i] * views.views[i];
  }
  if (m < 2) return params;

  const int tau_max = cfg.estimate_delays ? cfg.tau_max : 0;
  const int wide = std::min(2 * tau_max, (n - 1) / 2);
  std::vector<std::vector<int>> lag(m, std::vector<int>(static_cast<std::size_t>(p), 0));
  for (std::size_t i = 1; i < m; ++i) {
    const auto match = match_permutation(z[i], z[0], wide);
    params.W[i] = permute_rows(params.W[i], match);
    for (Eigen::Index k = 0; k < p; ++k)
      lag[i][static_cast<std::size_t>(match.perm[static_cast<std::size_t>(k)])] = match.lag[static_cast<std::size_t>(k)];
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    long long sum = 0;
    for (std::size_t i = 0; i < m; ++i) sum += lag[i][uj];
    const auto c = static_cast<int>(std::llround(static_cast<double>(sum) / static_cast<double>(m)));
    for (std::size_t i = 0; i < m; ++i) lag[i][uj] = std::clamp(lag[i][uj] - c, -tau_max, tau_max);
  }
  for (std::size_t i = 0; i < m; ++i) params.tau[i] = DelayVector(lag[i], n);

  const SignalMatrix mean = aligned_sources(params, views).mean;
  for (std::size_t i = 0; i < m; ++i) {
    const auto match = match_permutation(params.W[i] * views.views[i], mean, tau_max);
    params.W[i] = permute_rows(params.W[i], match);
    std::vector<int> t(static_cast<std::size_t>(p), 0);
    for (Eigen::Index k = 0; k < p; ++k)
      t[static_cast<std::size_t>(match.perm[static_cast<std::size_t>(k)])] = match.lag[static_cast<std::size_t>(k)];
    params.tau[i] = DelayVector(std::move(t), n);
  }
  return params;
}

}  // namespace

SolverState initialize(const ViewSet& views, const FitConfig& cfg) {
  validate(cfg, views);
  const std::size_t m = views.m();
  if (cfg.init == InitKind::per_view_ica) {
    SolverState state = SolverState::from_params(per_view_ica_start(views, cfg), views);
    if (cfg.estimate_delays && cfg.tau_max > 0) {
      recenter_delays(state, cfg.tau_max);
    }
    state.nll_history.push_back({NllRecord::Phase::init, 0, state.nll()});
    return state;
  }
  ModelParams params = ModelParams::identity(m, views.p(), views.n());
  params.sigma = cfg.sigma;
  params.density = cfg.density;
  if (cfg.init == InitKind::provided) {
    for (std::size_t i = 0; i < m; ++i) {
      params.W[i] = cfg.init_W[i];
      log_abs_det(params.W[i], i);
    }
  } else {
    const Matrix rot = cfg.random_rotation ? random_orthogonal(views.p(), cfg.seed)
                                           : Matrix::Identity(views.p(), views.p());
    for (std::size_t i = 0; i < m; ++i) params.W[i] = rot * whitening_matrix(views.views[i], i);
  }
  SolverState state = SolverState::from_params(std::move(params), views);
  state.nll_history.push_back({NllRecord::Phase::init, 0, state.nll()});
  return state;
}

FitResult fit(const ViewSet& views, const FitConfig& cfg) {
  SolverState state = initialize(views, cfg);
  const std::size_t m = views.m();
  // Delay sweeps run whenever delays are estimated; with tau_max = 0 they are
  // the identity and never count as a change.
  const bool delays_on = cfg.estimate_delays && m >= 2;
  const bool delays_free = delays_on && cfg.tau_max > 0;

  FitResult result;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    state.sweep_count = sweep;
    double gmax = 0.0;
    bool any_accepted = false;
    for (std::size_t i = 0; i < m; ++i) {
      const auto step = update_view_w(i, state, views, cfg.line_search);
      gmax = std::max(gmax, step.grad_norm);
      any_accepted = any_accepted || step.accepted;
    }
    if (any_accepted) {
      state.refresh_mean();
      state.nll_history.push_back({NllRecord::Phase::unmixing, sweep, state.nll()});
    }

    const bool delay_sweep = delays_on && sweep > cfg.delay_warmup_sweeps;
    int changed = 0;
    if (delay_sweep) {
      for (std::size_t i = 0; i < m; ++i)
        changed += update_view_delays(i, state, cfg.tau_max, cfg.mode);
      if (changed > 0) {
        recenter_delays(state, cfg.tau_max);
        state.refresh_mean();
        state.nll_history.push_back({NllRecord::Phase::delays, sweep, state.nll()});
      }
    }

    result.sweeps = sweep;
    result.final_grad_norm = gmax;
    const bool delays_settled = !delays_free || (delay_sweep && changed == 0);
    if (gmax < cfg.gtol && delays_settled) {
      result.converged = true;
      break;
    }
    // Nothing moved: the deterministic iteration would repeat this sweep forever.
    if (!any_accepted && changed == 0 && (!delays_free || delay_sweep)) break;
  }

  result.W = state.params.W;
  result.tau = state.params.tau;
  result.shared_sources = state.aligned.mean;
  result.nll_history = std::move(state.nll_history);
  return result;
}

SignalMatrix reconstruct_sources(const FitResult& result, const ViewSet& views) {
  ModelParams params;
  params.W = result.W;
  params.tau = result.tau;
  return aligned_sources(params, views).mean;
}

}  // namespace mvicad
