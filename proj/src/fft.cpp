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

#include "mvicad/fft.hpp"

#include "mvicad/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

namespace mvicad {

namespace {
// FFTW's planner is not thread-safe; execution with distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

struct CircularCorrelator::Impl {
  std::size_t n = 0;
  std::size_t nc = 0;
  double* real_buf = nullptr;
  fftw_complex* spec_z = nullptr;
  fftw_complex* spec_r = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(std::size_t len) : n(len), nc(len / 2 + 1) {
    std::lock_guard lock(planner_mutex());
    real_buf = fftw_alloc_real(n);
    spec_z = fftw_alloc_complex(nc);
    spec_r = fftw_alloc_complex(nc);
    const int ni = static_cast<int>(n);
    forward = fftw_plan_dft_r2c_1d(ni, real_buf, spec_z, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(ni, spec_z, real_buf, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real_buf);
    fftw_free(spec_z);
    fftw_free(spec_r);
  }
};

CircularCorrelator::CircularCorrelator(std::size_t n) {
  if (n < 2) throw ParameterError("correlation length must be at least 2");
  impl_ = std::make_unique<Impl>(n);
}

CircularCorrelator::~CircularCorrelator() = default;
CircularCorrelator::CircularCorrelator(CircularCorrelator&&) noexcept = default;
CircularCorrelator& CircularCorrelator::operator=(CircularCorrelator&&) noexcept = default;

std::size_t CircularCorrelator::size() const noexcept { return impl_->n; }

void CircularCorrelator::correlate(std::span<const double> z, std::span<const double> ref,
                                   std::span<double> out) {
  Impl& s = *impl_;
  if (z.size() != s.n) throw DimensionError("cols", s.n, z.size());
  if (ref.size() != s.n) throw DimensionError("cols", s.n, ref.size());
  if (out.size() != s.n) throw DimensionError("cols", s.n, out.size());

  std::copy(ref.begin(), ref.end(), s.real_buf);
  fftw_execute_dft_r2c(s.forward, s.real_buf, s.spec_r);
  std::copy(z.begin(), z.end(), s.real_buf);
  fftw_execute_dft_r2c(s.forward, s.real_buf, s.spec_z);

  // Z * conj(R) transforms back to sum_t z[t + k] ref[t].
  for (std::size_t k = 0; k < s.nc; ++k) {
    const double zr = s.spec_z[k][0], zi = s.spec_z[k][1];
    const double rr = s.spec_r[k][0], ri = s.spec_r[k][1];
    s.spec_z[k][0] = zr * rr + zi * ri;
    s.spec_z[k][1] = zi * rr - zr * ri;
  }
  fftw_execute_dft_c2r(s.backward, s.spec_z, s.real_buf);
  const double scale = 1.0 / static_cast<double>(s.n);
  for (std::size_t k = 0; k < s.n; ++k) out[k] = s.real_buf[k] * scale;
}

CircularCorrelator& thread_correlator(std::size_t n) {
  thread_local std::map<std::size_t, CircularCorrelator> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, CircularCorrelator(n)).first;
  return it->second;
}

}  // namespace mvicad
