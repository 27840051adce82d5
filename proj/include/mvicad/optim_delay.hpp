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

#include "mvicad/state.hpp"

#include <span>
#include <vector>

namespace mvicad {

/// Per-source delays, or one delay shared by all sources of a view.
enum class DelayMode { per_source, per_view };

/// Inner products <T_{-tau}(z), ref> = sum_t z[(t + tau) mod n] ref[t] for
/// tau = -tau_max .. tau_max (entry tau + tau_max), from one FFT correlation.
std::vector<double> lag_window_correlation(std::span<const double> z, std::span<const double> ref,
                                           int tau_max);

/// Lag in [-tau_max, tau_max] maximizing <T_{-tau}(z), ref>. Ties go to the
/// smallest |tau|, then to the smaller signed tau. Requires 2 * tau_max < n.
int best_delay(std::span<const double> z, std::span<const double> ref, int tau_max);

/// Re-estimates the delays of view i against the mean of the other views'
/// aligned sources and refreshes Y^i and the mean. Returns the number of
/// delay entries that changed. Never increases alignment_residual() in
/// per-source mode; in per-view mode only when view i already has one shared
/// delay (the search space is then a superset of the current point).
int update_view_delays(std::size_t i, SolverState& state, int tau_max, DelayMode mode);

/// Removes the common per-source offset across views: subtracts from every
/// view the rounded mean delay of each source, clamped so that all delays stay
/// within [-tau_max, tau_max]. The likelihood is unchanged; aligned sources
/// are re-shifted accordingly.
void recenter_delays(SolverState& state, int tau_max);

}  // namespace mvicad
