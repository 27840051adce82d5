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

#include "mvicad/optim_delay.hpp"

#include "mvicad/errors.hpp"
#include "mvicad/fft.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace mvicad {

namespace {

void check_window(std::size_t n, int tau_max) {
  if (tau_max < 0) throw ParameterError("tau_max must be non-negative");
  if (2 * static_cast<std::size_t>(tau_max) >= n)
    throw ParameterError("tau_max must be smaller than n / 2");
}

double direct_inner(std::span<const double> z, std::span<const double> ref, int tau) {
  const auto n = static_cast<long long>(z.size());
  long long k = tau % n;
  if (k < 0) k += n;
  double acc = 0.0;
  for (long long t = 0; t < n; ++t) acc += z[static_cast<std::size_t>((t + k) % n)] * ref[t];
  return acc;
}

bool preferred(int a, int b) {
  if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
  return a < b;
}

// The FFT curve locates the maximum; lags within roundoff of it are re-scored
// by direct summation so near-ties resolve the same way as an exact search.
int select_lag(const std::vector<double>& curve, int tau_max, double scale,
               const std::function<double(int)>& direct) {
  const double top = *std::max_element(curve.begin(), curve.end());
  const double tol = 1e-9 * scale + std::numeric_limits<double>::min();
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (int tau = -tau_max; tau <= tau_max; ++tau) {
    if (curve[static_cast<std::size_t>(tau + tau_max)] < top - tol) continue;
    const double v = direct(tau);
    if (!have || v > best_value || (v == best_value && preferred(tau, best))) {
      best = tau;
      best_value = v;
      have = true;
    }
  }
  return best;
}

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

std::vector<double> lag_window_correlation(std::span<const double> z, std::span<const double> ref,
                                           int tau_max) {
  if (z.size() != ref.size()) throw DimensionError("cols", z.size(), ref.size());
  const std::size_t n = z.size();
  check_window(n, tau_max);
  std::vector<double> full(n);
  thread_correlator(n).correlate(z, ref, full);
  std::vector<double> window(2 * static_cast<std::size_t>(tau_max) + 1);
  for (int tau = -tau_max; tau <= tau_max; ++tau) {
    const std::size_t k = tau >= 0 ? static_cast<std::size_t>(tau) : n - static_cast<std::size_t>(-tau);
    window[static_cast<std::size_t>(tau + tau_max)] = full[k];
  }
  return window;
}

int best_delay(std::span<const double> z, std::span<const double> ref, int tau_max) {
  const auto curve = lag_window_correlation(z, ref, tau_max);
  return select_lag(curve, tau_max, norm(z) * norm(ref),
                    [&](int tau) { return direct_inner(z, ref, tau); });
}

int update_view_delays(std::size_t i, SolverState& state, int tau_max, DelayMode mode) {
  auto& aligned = state.aligned;
  const std::size_t m = aligned.Y.size();
  if (m < 2) throw ParameterError("delay estimation needs at least two views");
  if (i >= m) throw ParameterError("view index out of range");
  const Eigen::Index p = aligned.mean.rows();
  const Eigen::Index n = aligned.mean.cols();
  check_window(static_cast<std::size_t>(n), tau_max);

  DelayVector& tau = state.params.tau[i];
  // Current unmixed sources of view i in its own frame, and the mean of the
  // other views' aligned sources.
  const SignalMatrix z = circular_shift(aligned.Y[i], tau.values());
  const SignalMatrix ref =
      (static_cast<double>(m) * aligned.mean - aligned.Y[i]) / static_cast<double>(m - 1);

  auto row = [](const SignalMatrix& s, Eigen::Index j) {
    return std::span<const double>(s.row(j).data(), static_cast<std::size_t>(s.cols()));
  };

  std::vector<int> next(tau.values().begin(), tau.values().end());
  if (mode == DelayMode::per_source) {
#pragma omp parallel for schedule(static) if (p * n > (1 << 15))
    for (Eigen::Index j = 0; j < p; ++j)
      next[static_cast<std::size_t>(j)] = best_delay(row(z, j), row(ref, j), tau_max);
  } else {
    std::vector<double> total(2 * static_cast<std::size_t>(tau_max) + 1, 0.0);
    double scale = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto curve = lag_window_correlation(row(z, j), row(ref, j), tau_max);
      for (std::size_t k = 0; k < total.size(); ++k) total[k] += curve[k];
      scale += norm(row(z, j)) * norm(row(ref, j));
    }
    const int shared = select_lag(total, tau_max, scale, [&](int t) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) acc += direct_inner(row(z, j), row(ref, j), t);
      return acc;
    });
    std::fill(next.begin(), next.end(), shared);
  }

  int changed = 0;
  for (std::size_t j = 0; j < next.size(); ++j) changed += (next[j] != tau[j]) ? 1 : 0;
  if (changed == 0) return 0;

  for (std::size_t j = 0; j < next.size(); ++j) tau.set(j, next[j]);
  state.replace_aligned(i, circular_shift(z, (-tau).values()));
  return changed;
}

void recenter_delays(SolverState& state, int tau_max) {
  auto& taus = state.params.tau;
  const std::size_t m = taus.size();
  if (m == 0) return;
  const std::size_t p = taus.front().size();
  std::vector<int> offset(p, 0);
  bool any = false;
  for (std::size_t j = 0; j < p; ++j) {
    long long sum = 0;
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (const auto& t : taus) {
      sum += t[j];
      lo = std::min(lo, t[j]);
      hi = std::max(hi, t[j]);
    }
    // c = ceil(mean - 1/2) leaves a residual mean in (-1/2, 1/2].
    const long long num = 2 * sum - static_cast<long long>(m);
    const long long den = 2 * static_cast<long long>(m);
    long long c = num >= 0 ? (num + den - 1) / den : -((-num) / den);
    // Keep every shifted delay inside the search window.
    c = std::clamp<long long>(c, static_cast<long long>(hi) - tau_max,
                              std::max<long long>(static_cast<long long>(hi) - tau_max,
                                                  static_cast<long long>(lo) + tau_max));
    offset[j] = static_cast<int>(c);
    any = any || c != 0;
  }
  if (!any) return;

  for (auto& t : taus)
    for (std::size_t j = 0; j < p; ++j) t.set(j, static_cast<long long>(t[j]) - offset[j]);
  // Y^i = T_{-tau^i}(Z^i) moves by +offset on every view, and so does the mean.
  auto& aligned = state.aligned;
  for (auto& y : aligned.Y) y = circular_shift(y, offset);
  aligned.mean = circular_shift(aligned.mean, offset);
}

}  // namespace mvicad
