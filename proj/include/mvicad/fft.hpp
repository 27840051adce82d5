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

#include <cstddef>
#include <memory>
#include <span>

namespace mvicad {

/// Circular cross-correlation of real rows of fixed length through FFTW:
///   out[k] = sum_t z[(t + k) mod n] * ref[t],  k = 0 .. n-1.
/// Lag k > n/2 stands for the negative lag k - n.
///
/// One instance owns its plans and work buffers and is not safe to share
/// between threads; use `thread_correlator(n)` for a per-thread instance.
class CircularCorrelator {
 public:
  explicit CircularCorrelator(std::size_t n);
  ~CircularCorrelator();
  CircularCorrelator(CircularCorrelator&&) noexcept;
  CircularCorrelator& operator=(CircularCorrelator&&) noexcept;
  CircularCorrelator(const CircularCorrelator&) = delete;
  CircularCorrelator& operator=(const CircularCorrelator&) = delete;

  std::size_t size() const noexcept;

  void correlate(std::span<const double> z, std::span<const double> ref, std::span<double> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Per-thread correlator cached by length.
CircularCorrelator& thread_correlator(std::size_t n);

}  // namespace mvicad
