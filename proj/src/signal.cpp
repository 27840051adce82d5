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

#include "mvicad/signal.hpp"

#include "mvicad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mvicad {

void validate_signal(const SignalMatrix& s) {
  if (s.rows() < 1) throw DimensionError("rows", 1, 0);
  if (s.cols() < 2) throw DimensionError("cols", 2, static_cast<std::size_t>(s.cols()));
  if (!s.allFinite()) throw ParameterError("signal matrix contains non-finite values");
}

int canonicalize_delay(long long d, int n) {
  const long long period = n;
  long long r = d % period;
  if (r < 0) r += period;
  // r in [0, n); fold the upper half down so the result lies in (-n/2, n/2].
  if (2 * r > period) r -= period;
  return static_cast<int>(r);
}

DelayVector::DelayVector(std::vector<int> delays, int period)
    : delays_(std::move(delays)), period_(period) {
  if (period < 2) throw ParameterError("delay period must be at least 2");
  for (int& d : delays_) d = canonicalize_delay(d, period_);
}

DelayVector DelayVector::zeros(std::size_t p, int period) {
  return DelayVector(std::vector<int>(p, 0), period);
}

void DelayVector::set(std::size_t j, long long delay) {
  delays_.at(j) = canonicalize_delay(delay, period_);
}

DelayVector DelayVector::operator-() const {
  std::vector<int> neg(delays_.size());
  std::transform(delays_.begin(), delays_.end(), neg.begin(), [](int d) { return -d; });
  return DelayVector(std::move(neg), period_);
}

int DelayVector::max_abs() const noexcept {
  int m = 0;
  for (int d : delays_) m = std::max(m, std::abs(d));
  return m;
}

void roll_row(std::span<const double> in, long long shift, std::span<double> out) {
  const auto n = static_cast<long long>(in.size());
  long long k = shift % n;
  if (k < 0) k += n;
  // out[t] = in[t - k]: the tail of `in` moves to the front.
  std::copy(in.end() - k, in.end(), out.begin());
  std::copy(in.begin(), in.end() - k, out.begin() + k);
}

void circular_shift_into(const SignalMatrix& s, std::span<const int> shifts, SignalMatrix& out) {
  if (shifts.size() != static_cast<std::size_t>(s.rows()))
    throw DimensionError("rows", static_cast<std::size_t>(s.rows()), shifts.size());
  out.resize(s.rows(), s.cols());
  const auto n = static_cast<std::size_t>(s.cols());
  for (Eigen::Index j = 0; j < s.rows(); ++j) {
    roll_row({s.row(j).data(), n}, shifts[j], {out.row(j).data(), n});
  }
}

SignalMatrix circular_shift(const SignalMatrix& s, std::span<const int> shifts) {
  SignalMatrix out;
  circular_shift_into(s, shifts, out);
  return out;
}

SignalMatrix circular_shift(const SignalMatrix& s, const DelayVector& tau) {
  if (tau.size() != static_cast<std::size_t>(s.rows()))
    throw DimensionError("rows", static_cast<std::size_t>(s.rows()), tau.size());
  if (tau.period() != s.cols())
    throw DimensionError("cols", static_cast<std::size_t>(s.cols()),
                         static_cast<std::size_t>(tau.period()));
  return circular_shift(s, tau.values());
}

std::vector<double> tukey_window(std::size_t n, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("tukey alpha must lie in [0, 1]");
  std::vector<double> w(n, 1.0);
  if (n < 2 || alpha == 0.0) return w;
  const double span = alpha * static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double pos = static_cast<double>(std::min(k, n - 1 - k));
    if (pos < span / 2.0) w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * pos / span));
  }
  return w;
}

SignalMatrix apply_window(const SignalMatrix& x, const WindowSpec& spec) {
  if (spec.kind == WindowSpec::Kind::none) return x;
  const auto w = tukey_window(static_cast<std::size_t>(x.cols()), spec.alpha);
  const Eigen::Map<const Eigen::RowVectorXd> wr(w.data(), static_cast<Eigen::Index>(w.size()));
  SignalMatrix out = x;
  out.array().rowwise() *= wr.array();
  return out;
}

}  // namespace mvicad
