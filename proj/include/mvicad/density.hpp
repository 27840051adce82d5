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

#include <cmath>
#include <numbers>

namespace mvicad {

/// Surrogate log-density used by the likelihood. `none` switches the
/// non-Gaussian term off (pure quadratic/log-det problem), used by tests.
enum class Density { logcosh, none };

struct DensityValue {
  double value;
  double first;
  double second;
};

/// log cosh(u) and its first two derivatives, stable for large |u|.
inline DensityValue f_eval(double u) noexcept {
  const double a = std::abs(u);
  const double th = std::tanh(u);
  return {a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2, th, 1.0 - th * th};
}

inline DensityValue f_eval(Density d, double u) noexcept {
  if (d == Density::none) return {0.0, 0.0, 0.0};
  return f_eval(u);
}

}  // namespace mvicad
