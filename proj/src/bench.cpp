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

#include "mvicad/bench.hpp"

#include "mvicad/errors.hpp"

#include <chrono>
#include <cmath>
#include <exception>

namespace mvicad {

void validate(const ExperimentGrid& grid) {
  if (grid.delay_levels.empty()) throw ParameterError("grid needs at least one delay level");
  if (grid.seeds < 1) throw ParameterError("grid needs at least one seed");
  for (int d : grid.delay_levels) {
    if (d < 0) throw ParameterError("delay levels must be non-negative");
    if (2 * d >= grid.sim.n) throw ParameterError("delay levels must be below n / 2");
  }
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AmariCell run_cell(const ViewSet& data, const FitConfig& base, int level, std::uint64_t seed,
                   bool with_delays) {
  AmariCell cell;
  cell.delay_level = level;
  cell.seed = seed;
  cell.algorithm = with_delays ? kWithDelays : kWithoutDelays;
  FitConfig cfg = base;
  cfg.tau_max = with_delays ? level : 0;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const FitResult r = fit(data, cfg);
    cell.amari = mean_amari_distance(r.W, data.truth->mixing);
    cell.sweeps = r.sweeps;
    cell.converged = r.converged;
  } catch (const std::exception& e) {
    cell.error = sanitize_field(e.what());
  }
  cell.wall_seconds = seconds_since(t0);
  return cell;
}

}  // namespace

AmariBenchResult bench_amari(const ExperimentGrid& grid) {
  validate(grid);
  const int levels = static_cast<int>(grid.delay_levels.size());
  const int total = levels * grid.seeds;
  std::vector<AmariCell> cells(static_cast<std::size_t>(2 * total));

  // Cells are independent; each writes its own slots so output order is fixed.
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < total; ++c) {
    const int level = grid.delay_levels[static_cast<std::size_t>(c / grid.seeds)];
    const std::uint64_t seed = grid.seed_base + static_cast<std::uint64_t>(c % grid.seeds);
    SimConfig sim = grid.sim;
    sim.tau_max_true = level;
    sim.seed = seed;
    const auto slot = static_cast<std::size_t>(2 * c);
    try {
      const ViewSet data = generate_dataset(sim);
      cells[slot] = run_cell(data, grid.fit, level, seed, true);
      cells[slot + 1] = run_cell(data, grid.fit, level, seed, false);
    } catch (const std::exception& e) {
      for (int k = 0; k < 2; ++k) {
        auto& cell = cells[slot + static_cast<std::size_t>(k)];
        cell.delay_level = level;
        cell.seed = seed;
        cell.algorithm = k == 0 ? kWithDelays : kWithoutDelays;
        cell.error = sanitize_field(e.what());
      }
    }
  }

  AmariBenchResult out;
  out.cells = std::move(cells);
  for (int level : grid.delay_levels) {
    for (const char* algo : {kWithDelays, kWithoutDelays}) {
      AmariSummary s;
      s.delay_level = level;
      s.algorithm = algo;
      double acc = 0.0;
      for (const auto& cell : out.cells) {
        if (cell.delay_level != level || cell.algorithm != algo || !cell.error.empty()) continue;
        acc += cell.amari;
        ++s.count;
      }
      s.mean_amari = s.count > 0 ? acc / s.count : std::nan("");
      out.summary.push_back(std::move(s));
    }
  }
  return out;
}

CsvTable cells_table(const std::vector<AmariCell>& cells) {
  CsvTable t;
  t.header = {"delay_level", "seed", "algorithm", "amari_mean", "sweeps", "converged", "wall_time", "error"};
  for (const auto& c : cells) {
    t.rows.push_back({std::to_string(c.delay_level), std::to_string(c.seed), c.algorithm,
                      format_double(c.amari), std::to_string(c.sweeps), c.converged ? "1" : "0",
                      format_double(c.wall_seconds), c.error});
  }
  return t;
}

CsvTable summary_table(const std::vector<AmariSummary>& summary) {
  CsvTable t;
  t.header = {"delay_level", "algorithm", "mean_amari", "count"};
  for (const auto& s : summary)
    t.rows.push_back({std::to_string(s.delay_level), s.algorithm, format_double(s.mean_amari),
                      std::to_string(s.count)});
  return t;
}

DelayBenchResult bench_delays(const SimConfig& sim, const FitConfig& fit_cfg,
                              const PermutationTestConfig& test) {
  if (sim.m < 2) throw ParameterError("delay benchmark needs at least two views");
  const auto t0 = std::chrono::steady_clock::now();
  const ViewSet data = generate_dataset(sim);
  const GroundTruth& gt = *data.truth;

  DelayBenchResult out;
  out.snr = measure_snr(gt);
  out.fit = fit(data, fit_cfg);
  out.amari = mean_amari_distance(out.fit.W, gt.mixing);
  out.match = match_permutation(out.fit.shared_sources, gt.sources, fit_cfg.tau_max);

  DelayTable est, truth;
  for (std::size_t i = 0; i < data.m(); ++i) {
    est.emplace_back(out.fit.tau[i].values().begin(), out.fit.tau[i].values().end());
    truth.emplace_back(gt.delays[i].values().begin(), gt.delays[i].values().end());
  }
  out.report = delay_recovery_report(est, truth, out.match.perm, test);

  const std::size_t p = truth.front().size();
  for (std::size_t k = 0; k < out.report.true_centered.size(); ++k) {
    out.rows.push_back({static_cast<int>(k / p), static_cast<int>(k % p), out.report.true_centered[k],
                        out.report.est_centered[k]});
  }
  out.wall_seconds = seconds_since(t0);
  return out;
}

CsvTable scatter_table(const DelayBenchResult& result) {
  CsvTable t;
  t.header = {"view", "source", "true_delay_centered", "est_delay_centered"};
  for (const auto& r : result.rows)
    t.rows.push_back({std::to_string(r.view), std::to_string(r.source), format_double(r.true_centered),
                      format_double(r.est_centered)});
  return t;
}

CsvTable delay_summary_table(const DelayBenchResult& result) {
  const auto& rep = result.report;
  CsvTable t;
  t.header = {"pairs", "slope", "intercept", "r_squared", "p_value", "snr", "amari_mean",
              "sweeps", "converged", "degenerate", "wall_time"};
  t.rows.push_back({std::to_string(rep.true_centered.size()), format_double(rep.slope),
                    format_double(rep.intercept), format_double(rep.r_squared),
                    format_double(rep.p_value), format_double(result.snr), format_double(result.amari),
                    std::to_string(result.fit.sweeps), result.fit.converged ? "1" : "0",
                    rep.degenerate ? "1" : "0", format_double(result.wall_seconds)});
  return t;
}

}  // namespace mvicad
