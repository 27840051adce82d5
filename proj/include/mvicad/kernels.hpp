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

// Sample-axis kernels behind the likelihood and its derivatives.
//
// Two implementations share one contract:
//   serial::   plain loops over samples, kept as the reference.
//   parallel:: OpenMP over fixed-width column blocks. Per-block partials are
//              combined in block order, so results do not depend on the number
//              of threads. They differ from serial:: only by summation order.
//
// The library calls the parallel versions; tests check them against serial::.

#include "mvicad/density.hpp"
#include "mvicad/signal.hpp"

#include <cstddef>

namespace mvicad::kernels {

/// Column block width of the parallel kernels.
inline constexpr Eigen::Index kBlock = 512;

/// Loss-only sums for one view, with S~ = (Z + (m-1) M) / m:
///   quad = ||Z - M||^2, fsum = sum f(S~).
struct LossSums {
  double quad = 0.0;
  double fsum = 0.0;
};

/// Sums needed for the relative gradient and the Hessian approximation.
/// All are plain sums over samples (not means).
struct GradSums {
  double quad = 0.0;
  double fsum = 0.0;
  Matrix resid_z;          // (Z - M) Z^T
  Matrix score_z;          // f'(S~) Z^T
  Eigen::VectorXd curv;    // sum_t f''(S~_{a,t})
  Eigen::VectorXd power;   // sum_t Z_{b,t}^2
};

namespace serial {
void unmix(const Matrix& w, const SignalMatrix& x, SignalMatrix& out);
LossSums loss_sums(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d);
GradSums grad_sums(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d);
double density_sum(const SignalMatrix& s, Density d);
}  // namespace serial

namespace parallel {
void unmix(const Matrix& w, const SignalMatrix& x, SignalMatrix& out);
LossSums loss_sums(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d);
GradSums grad_sums(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d);
double density_sum(const SignalMatrix& s, Density d);
}  // namespace parallel

}  // namespace mvicad::kernels
