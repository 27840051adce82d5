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

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace mvicad {

/// Row-major dense matrix. Signal matrices are p x n with one signal per row;
/// square p x p matrices (mixing, unmixing, gradients) use the same type.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SignalMatrix = Matrix;

/// Throws unless `s` has at least one row, at least two columns and only finite values.
void validate_signal(const SignalMatrix& s);

/// Representative of `d` modulo `n` in (-n/2, n/2].
int canonicalize_delay(long long d, int n);

/// Integer per-row delays, always stored canonicalized modulo the signal length.
class DelayVector {
 public:
  DelayVector() = default;
  DelayVector(std::vector<int> delays, int period);

  static DelayVector zeros(std::size_t p, int period);

  std::size_t size() const noexcept { return delays_.size(); }
  int period() const noexcept { return period_; }
  int operator[](std::size_t j) const { return delays_[j]; }
  std::span<const int> values() const noexcept { return delays_; }

  void set(std::size_t j, long long delay);
  DelayVector operator-() const;

  /// Largest canonical magnitude.
  int max_abs() const noexcept;
  bool within(int tau_max) const noexcept { return max_abs() <= tau_max; }

  friend bool operator==(const DelayVector&, const DelayVector&) = default;

 private:
  std::vector<int> delays_;
  int period_ = 2;
};

/// Rolls row j right by shifts[j] samples with periodic boundary:
/// out(j, t) = in(j, (t - shifts[j]) mod n). Positive shifts delay the signal.
SignalMatrix circular_shift(const SignalMatrix& s, std::span<const int> shifts);
SignalMatrix circular_shift(const SignalMatrix& s, const DelayVector& tau);

/// Same as circular_shift but writes into `out`, which is resized if needed.
/// `out` must not alias `s`.
void circular_shift_into(const SignalMatrix& s, std::span<const int> shifts, SignalMatrix& out);

/// Rolls a single row right by `shift` samples.
void roll_row(std::span<const double> in, long long shift, std::span<double> out);

struct WindowSpec {
  enum class Kind { none, tukey };
  Kind kind = Kind::none;
  double alpha = 0.0;

  static WindowSpec none() { return {}; }
  static WindowSpec tukey(double alpha) { return {Kind::tukey, alpha}; }
};

/// Tukey (tapered cosine) window of length n: zero at both ends, flat on the central
/// (1 - alpha) fraction. alpha = 0 is rectangular, alpha = 1 is a Hann window.
std::vector<double> tukey_window(std::size_t n, double alpha);

/// Multiplies each row of `x` pointwise by the window.
SignalMatrix apply_window(const SignalMatrix& x, const WindowSpec& spec);

}  // namespace mvicad
