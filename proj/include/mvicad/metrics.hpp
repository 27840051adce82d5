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
#include <string>
#include <vector>

namespace mvicad {

/// Amari distance of P = W A from the set of scaled permutation matrices:
///   1/(2p) sum_rows (sum_j |P_ij| / max_j |P_ij| - 1)
/// + 1/(2p) sum_cols (sum_i |P_ij| / max_i |P_ij| - 1).
double amari_distance(const Matrix& w, const Matrix& a);

/// Mean of amari_distance(W^i, A^i) over views.
double mean_amari_distance(const std::vector<Matrix>& w, const std::vector<Matrix>& a);

/// Estimated row k corresponds to true row perm[k], up to sign[k] and a
/// circular lag: est_k ~ sign[k] * T_{lag[k]}(true_{perm[k]}).
struct PermutationMatch {
  std::vector<int> perm;
  std::vector<int> sign;
  std::vector<int> lag;
  Matrix score;  ///< normalized max |cross-correlation|, est row x true row
};

/// Greedy assignment on the maximal absolute normalized circular
/// cross-correlation over lags in [-tau_max, tau_max].
PermutationMatch match_permutation(const SignalMatrix& est, const SignalMatrix& truth, int tau_max);

/// Delays as m rows (views) of p integers.
using DelayTable = std::vector<std::vector<int>>;

struct DelayRecoveryReport {
  std::vector<double> true_centered;  ///< pooled, view-major
  std::vector<double> est_centered;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double pearson_r = 0.0;
  double p_value = 1.0;
  bool degenerate = false;  ///< true delays have no spread; fit statistics are placeholders
  std::string note;
};

struct PermutationTestConfig {
  int resamples = 10000;
  std::uint64_t seed = 0;
};

/// Maps estimated source k onto true source perm[k], removes the per-source
/// mean across views from both tables and regresses estimated on true delays.
/// p_value is the fraction of label permutations whose |Pearson r| reaches the
/// observed one.
DelayRecoveryReport delay_recovery_report(const DelayTable& est, const DelayTable& truth,
                                          const std::vector<int>& perm,
                                          const PermutationTestConfig& test = {});

}  // namespace mvicad
