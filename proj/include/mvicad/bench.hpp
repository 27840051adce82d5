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

#include "mvicad/csv.hpp"
#include "mvicad/metrics.hpp"
#include "mvicad/simgen.hpp"
#include "mvicad/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mvicad {

/// Benchmark defaults: noise sigma 0.5 (SNR 4 for unit-power sources).
inline SimConfig default_bench_sim() {
  SimConfig s;
  s.sigma = 0.5;
  return s;
}

/// Benchmark defaults: per-view ICA start. From a plain whitening start the
/// delay search can lock onto a wrong bump alignment before the sources
/// separate.
inline FitConfig default_bench_fit() {
  FitConfig f;
  f.init = InitKind::per_view_ica;
  return f;
}

/// Sweep over true delay levels and seeds, comparing the delay-aware fit
/// (tau_max = level) with the delay-free fit (tau_max = 0).
struct ExperimentGrid {
  std::vector<int> delay_levels{0, 10, 20, 30, 40};
  int seeds = 10;
  std::uint64_t seed_base = 0;
  SimConfig sim = default_bench_sim();  ///< tau_max_true and seed are overwritten per cell
  FitConfig fit = default_bench_fit();  ///< tau_max is overwritten per algorithm
};

void validate(const ExperimentGrid& grid);

inline constexpr const char* kWithDelays = "mvicad";
inline constexpr const char* kWithoutDelays = "mvica";

struct AmariCell {
  int delay_level = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  double amari = 0.0;
  int sweeps = 0;
  bool converged = false;
  double wall_seconds = 0.0;
  std::string error;  ///< empty on success
};

struct AmariSummary {
  int delay_level = 0;
  std::string algorithm;
  double mean_amari = 0.0;
  int count = 0;  ///< successful cells in the mean
};

struct AmariBenchResult {
  std::vector<AmariCell> cells;        ///< ordered by (level, seed, algorithm)
  std::vector<AmariSummary> summary;   ///< ordered by (level, algorithm)
};

AmariBenchResult bench_amari(const ExperimentGrid& grid);

CsvTable cells_table(const std::vector<AmariCell>& cells);
CsvTable summary_table(const std::vector<AmariSummary>& summary);

struct DelayScatterRow {
  int view = 0;
  int source = 0;  ///< index of the true source
  double true_centered = 0.0;
  double est_centered = 0.0;
};

struct DelayBenchResult {
  std::vector<DelayScatterRow> rows;
  DelayRecoveryReport report;
  PermutationMatch match;
  FitResult fit;
  double snr = 0.0;
  double amari = 0.0;
  double wall_seconds = 0.0;
};

/// One dataset, one fit, delay recovery against the ground truth.
DelayBenchResult bench_delays(const SimConfig& sim, const FitConfig& fit,
                              const PermutationTestConfig& test = {});

CsvTable scatter_table(const DelayBenchResult& result);
CsvTable delay_summary_table(const DelayBenchResult& result);

}  // namespace mvicad
