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

#include "mvicad/signal.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mvicad {

/// Shape of the synthetic sources: each row is a sum of raised-cosine bumps
/// with Laplace-distributed amplitudes.
struct SourceShape {
  int min_bumps = 1;
  int max_bumps = 3;
  int min_width = 20;  ///< full bump width in samples
  int max_width = 80;
  double amplitude_scale = 1.0;  ///< Laplace scale of bump amplitudes
};

struct SimConfig {
  int m = 5;
  int p = 3;
  int n = 700;
  int tau_max_true = 0;
  double sigma = 0.0;                 ///< noise standard deviation (pre-mixing)
  std::optional<double> snr_target;   ///< when set, overrides sigma
  std::uint64_t seed = 0;
  SourceShape shape;
  double max_condition = 1e3;         ///< mixing matrices are resampled above this
};

/// Throws ParameterError on an inconsistent configuration.
void validate(const SimConfig& cfg);

struct GroundTruth {
  SignalMatrix sources;               ///< S, p x n
  std::vector<Matrix> mixing;         ///< A^i, p x p
  std::vector<DelayVector> delays;    ///< tau^i
  std::vector<SignalMatrix> noise;    ///< N^i, p x n (may be empty when unknown)
};

/// Observations of m views, all p x n. Ground truth is attached when known.
struct ViewSet {
  std::vector<SignalMatrix> views;
  std::optional<GroundTruth> truth;

  std::size_t m() const noexcept { return views.size(); }
  Eigen::Index p() const { return views.front().rows(); }
  Eigen::Index n() const { return views.front().cols(); }
};

/// Throws unless there is at least one view and all views share one valid shape.
void validate(const ViewSet& vs);

/// Bump-shaped super-Gaussian sources, one row per source, unit mean power per row.
/// `margin` keeps every bump at least that many samples away from both edges.
SignalMatrix generate_sources(int p, int n, std::uint64_t seed, const SourceShape& shape,
                              int margin = 0);

/// Draws sources, delays, mixing matrices and noise and assembles
/// X^i = A^i (T_{tau^i}(S) + N^i). The returned ViewSet carries the ground truth.
ViewSet generate_dataset(const SimConfig& cfg);

/// Mean over views of ||T_{tau^i}(S)||^2 / ||N^i||^2. Returns +infinity when
/// every noise realization is exactly zero.
double measure_snr(const GroundTruth& gt);

/// Condition number (2-norm) of a square matrix; +infinity if singular.
double condition_number(const Matrix& a);

}  // namespace mvicad
