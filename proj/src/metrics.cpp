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

#include "mvicad/metrics.hpp"

#include "mvicad/errors.hpp"
#include "mvicad/optim_delay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mvicad {

double amari_distance(const Matrix& w, const Matrix& a) {
  if (w.rows() != w.cols()) throw DimensionError("cols", static_cast<std::size_t>(w.rows()),
                                                 static_cast<std::size_t>(w.cols()));
  if (a.rows() != w.rows() || a.cols() != w.cols())
    throw DimensionError("rows", static_cast<std::size_t>(w.rows()), static_cast<std::size_t>(a.rows()));
  if (Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() < a.rows())
    throw SingularMatrixError("singular mixing matrix", 0);

  const Eigen::ArrayXXd prod = (w * a).cwiseAbs().array();
  const double p = static_cast<double>(prod.rows());
  const auto rows = (prod.rowwise().sum() / prod.rowwise().maxCoeff()) - 1.0;
  const auto cols = (prod.colwise().sum() / prod.colwise().maxCoeff()) - 1.0;
  return (rows.sum() + cols.sum()) / (2.0 * p);
}

double mean_amari_distance(const std::vector<Matrix>& w, const std::vector<Matrix>& a) {
  if (w.size() != a.size()) throw DimensionError("views", w.size(), a.size());
  if (w.empty()) throw ParameterError("no views to compare");
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += amari_distance(w[i], a[i]);
  return acc / static_cast<double>(w.size());
}

PermutationMatch match_permutation(const SignalMatrix& est, const SignalMatrix& truth, int tau_max) {
  if (est.rows() != truth.rows())
    throw DimensionError("rows", static_cast<std::size_t>(truth.rows()), static_cast<std::size_t>(est.rows()));
  if (est.cols() != truth.cols())
    throw DimensionError("cols", static_cast<std::size_t>(truth.cols()), static_cast<std::size_t>(est.cols()));
  const Eigen::Index p = est.rows();
  const auto n = static_cast<std::size_t>(est.cols());

  PermutationMatch out;
  out.score = Matrix::Zero(p, p);
  Eigen::MatrixXi best_lag = Eigen::MatrixXi::Zero(p, p);
  Eigen::MatrixXi best_sign = Eigen::MatrixXi::Ones(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const double ek = est.row(k).norm();
    for (Eigen::Index l = 0; l < p; ++l) {
      const double tl = truth.row(l).norm();
      if (ek == 0.0 || tl == 0.0) continue;
      // c(tau) = <T_{-tau}(est_k), true_l>, maximal when est_k = T_tau(true_l).
      const auto curve = lag_window_correlation({est.row(k).data(), n}, {truth.row(l).data(), n}, tau_max);
      double top = -1.0;
      // Visit lags as 0, -1, 1, -2, 2, ... so that ties keep the smallest |lag|.
      for (int step = 0; step <= 2 * tau_max; ++step) {
        const int tau = (step % 2 == 1) ? -(step + 1) / 2 : step / 2;
        const double c = curve[static_cast<std::size_t>(tau + tau_max)] / (ek * tl);
        if (std::abs(c) > top) {
          top = std::abs(c);
          best_lag(k, l) = tau;
          best_sign(k, l) = c < 0.0 ? -1 : 1;
        }
      }
      out.score(k, l) = top;
    }
  }

  out.perm.assign(static_cast<std::size_t>(p), -1);
  out.sign.assign(static_cast<std::size_t>(p), 1);
  out.lag.assign(static_cast<std::size_t>(p), 0);
  std::vector<bool> est_used(static_cast<std::size_t>(p)), true_used(static_cast<std::size_t>(p));
  for (Eigen::Index round = 0; round < p; ++round) {
    Eigen::Index bk = -1, bl = -1;
    double top = -1.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (est_used[static_cast<std::size_t>(k)]) continue;
      for (Eigen::Index l = 0; l < p; ++l) {
        if (true_used[static_cast<std::size_t>(l)]) continue;
        if (out.score(k, l) > top) {
          top = out.score(k, l);
          bk = k;
          bl = l;
        }
      }
    }
    const auto uk = static_cast<std::size_t>(bk);
    est_used[uk] = true;
    true_used[static_cast<std::size_t>(bl)] = true;
    out.perm[uk] = static_cast<int>(bl);
    out.sign[uk] = best_sign(bk, bl);
    out.lag[uk] = best_lag(bk, bl);
  }
  return out;
}

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::vector<double>> center_per_source(const std::vector<std::vector<double>>& table) {
  const std::size_t m = table.size();
  const std::size_t p = table.front().size();
  auto out = table;
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += table[i][j];
    mean /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) out[i][j] = table[i][j] - mean;
  }
  return out;
}

}  // namespace

DelayRecoveryReport delay_recovery_report(const DelayTable& est, const DelayTable& truth,
                                          const std::vector<int>& perm,
                                          const PermutationTestConfig& test) {
  if (est.size() != truth.size()) throw DimensionError("views", truth.size(), est.size());
  if (truth.empty()) throw ParameterError("no delays to compare");
  const std::size_t m = truth.size();
  const std::size_t p = truth.front().size();
  if (perm.size() != p) throw DimensionError("sources", p, perm.size());
  if (test.resamples < 1) throw ParameterError("resamples must be positive");
  {
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < p; ++j)
      if (sorted[j] != static_cast<int>(j)) throw ParameterError("perm is not a permutation");
  }

  std::vector<std::vector<double>> t(m, std::vector<double>(p)), e(m, std::vector<double>(p));
  for (std::size_t i = 0; i < m; ++i) {
    if (est[i].size() != p) throw DimensionError("sources", p, est[i].size());
    if (truth[i].size() != p) throw DimensionError("sources", p, truth[i].size());
    for (std::size_t j = 0; j < p; ++j) {
      t[i][j] = truth[i][j];
      e[i][static_cast<std::size_t>(perm[j])] = est[i][j];
    }
  }
  t = center_per_source(t);
  e = center_per_source(e);

  DelayRecoveryReport rep;
  for (std::size_t i = 0; i < m; ++i) {
    rep.true_centered.insert(rep.true_centered.end(), t[i].begin(), t[i].end());
    rep.est_centered.insert(rep.est_centered.end(), e[i].begin(), e[i].end());
  }
  const auto& x = rep.true_centered;
  const auto& y = rep.est_centered;
  const double nn = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nn;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / nn;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) {
    rep.degenerate = true;
    rep.note = "true delays are constant within every source; slope undefined";
    return rep;
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  rep.pearson_r = pearson(x, y);
  rep.r_squared = rep.pearson_r * rep.pearson_r;

  std::mt19937_64 rng(test.seed);
  std::vector<double> shuffled = y;
  const double observed = std::abs(rep.pearson_r);
  int hits = 0;
  for (int r = 0; r < test.resamples; ++r) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (std::abs(pearson(x, shuffled)) >= observed) ++hits;
  }
  rep.p_value = static_cast<double>(hits) / test.resamples;
  return rep;
}

}  // namespace mvicad
