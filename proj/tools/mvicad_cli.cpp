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

// mvicad command line: simulate, fit, bench-amari, bench-delays, plot.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include "mvicad/bench.hpp"
#include "mvicad/dataset_io.hpp"
#include "mvicad/errors.hpp"
#include "mvicad/plot.hpp"
#include "mvicad/threads.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mvicad;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

const std::map<std::string, DelayMode> kModes{{"per-source", DelayMode::per_source},
                                              {"per-view", DelayMode::per_view}};
const std::map<std::string, InitKind> kInits{{"whitening", InitKind::whitening},
                                             {"per-view-ica", InitKind::per_view_ica}};
const std::map<std::string, Density> kDensities{{"logcosh", Density::logcosh}, {"none", Density::none}};
const std::map<std::string, PlotKind> kPlots{{"line", PlotKind::line}, {"scatter", PlotKind::scatter}};

template <class Map>
std::string name_of(const Map& map, typename Map::mapped_type v) {
  for (const auto& [k, val] : map)
    if (val == v) return k;
  return "?";
}

json sim_json(const SimConfig& s) {
  json j{{"m", s.m}, {"p", s.p}, {"n", s.n}, {"tau_max_true", s.tau_max_true}, {"sigma", s.sigma},
         {"seed", s.seed}, {"max_condition", s.max_condition},
         {"shape", {{"min_bumps", s.shape.min_bumps}, {"max_bumps", s.shape.max_bumps},
                    {"min_width", s.shape.min_width}, {"max_width", s.shape.max_width},
                    {"amplitude_scale", s.shape.amplitude_scale}}}};
  j["snr_target"] = s.snr_target ? json(*s.snr_target) : json(nullptr);
  return j;
}

json fit_json(const FitConfig& f) {
  return {{"tau_max", f.tau_max},
          {"sigma", f.sigma},
          {"density", name_of(kDensities, f.density)},
          {"max_sweeps", f.max_sweeps},
          {"gtol", f.gtol},
          {"delay_warmup_sweeps", f.delay_warmup_sweeps},
          {"mode", name_of(kModes, f.mode)},
          {"estimate_delays", f.estimate_delays},
          {"init", name_of(kInits, f.init)},
          {"init_sweeps", f.init_sweeps},
          {"random_rotation", f.random_rotation},
          {"seed", f.seed},
          {"line_search",
           {{"rho_init", f.line_search.rho_init},
            {"shrink", f.line_search.shrink},
            {"max_backtracks", f.line_search.max_backtracks}}}};
}

void write_json(const fs::path& file, const json& j) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataError::Kind::io, "cannot write " + file.string());
  out << j.dump(2) << '\n';
}

void add_sim_flags(CLI::App* app, SimConfig& s, std::optional<double>& snr) {
  app->add_option("--m", s.m, "number of views")->capture_default_str();
  app->add_option("--p", s.p, "number of sources")->capture_default_str();
  app->add_option("--n", s.n, "samples per view")->capture_default_str();
  app->add_option("--sim-sigma", s.sigma, "pre-mixing noise standard deviation")->capture_default_str();
  app->add_option("--snr", snr, "target SNR; overrides --sim-sigma");
  app->add_option("--max-condition", s.max_condition, "mixing condition number cap")->capture_default_str();
}

void add_fit_flags(CLI::App* app, FitConfig& f, bool with_tau) {
  if (with_tau) app->add_option("--tau-max", f.tau_max, "maximum absolute delay")->capture_default_str();
  app->add_option("--sigma", f.sigma, "likelihood noise scale")->capture_default_str();
  app->add_option("--sweeps", f.max_sweeps, "maximum number of sweeps")->capture_default_str();
  app->add_option("--gtol", f.gtol, "gradient tolerance")->capture_default_str();
  app->add_option("--warmup", f.delay_warmup_sweeps, "unmixing-only sweeps before delays")->capture_default_str();
  app->add_option("--mode", f.mode, "delay mode")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))
      ->default_str(name_of(kModes, f.mode));
  app->add_option("--init", f.init, "initialization")
      ->transform(CLI::CheckedTransformer(kInits, CLI::ignore_case))
      ->default_str(name_of(kInits, f.init));
  app->add_option("--init-sweeps", f.init_sweeps, "single-view sweeps for per-view-ica")->capture_default_str();
  app->add_option("--density", f.density, "source density")
      ->transform(CLI::CheckedTransformer(kDensities, CLI::ignore_case))
      ->default_str(name_of(kDensities, f.density));
  app->add_flag("--random-rotation", f.random_rotation, "rotate the whitened start by a seeded orthogonal matrix");
}

int run(int argc, char** argv) {
  CLI::App app{"Multiview ICA with delays"};
  app.require_subcommand(1);
  fs::path out;

  // simulate
  SimConfig sim;
  std::optional<double> sim_snr;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_sim_flags(simulate, sim, sim_snr);
  simulate->add_option("--tau-max-true", sim.tau_max_true, "maximum true delay")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  simulate->add_option("--out", out, "output dataset directory")->required();

  // fit
  FitConfig fcfg;
  fs::path data_dir;
  bool no_delays = false;
  auto* fitc = app.add_subcommand("fit", "fit a dataset");
  fitc->add_option("--data", data_dir, "dataset directory")->required();
  fitc->add_option("--out", out, "output directory")->required();
  fitc->add_option("--seed", fcfg.seed, "initialization seed")->capture_default_str();
  fitc->add_flag("--no-delays", no_delays, "keep every delay at zero");
  add_fit_flags(fitc, fcfg, true);

  // bench-amari
  ExperimentGrid grid;
  std::optional<double> grid_snr;
  auto* ba = app.add_subcommand("bench-amari", "Amari distance vs delay level, with and without delays");
  ba->add_option("--levels", grid.delay_levels, "true delay levels")->capture_default_str()->delimiter(',');
  ba->add_option("--seeds", grid.seeds, "seeds per level")->capture_default_str();
  ba->add_option("--seed", grid.seed_base, "first seed")->capture_default_str();
  ba->add_option("--out", out, "output directory")->required();
  add_sim_flags(ba, grid.sim, grid_snr);
  add_fit_flags(ba, grid.fit, false);

  // bench-delays
  SimConfig dsim = default_bench_sim();
  dsim.m = 40;
  dsim.p = 5;
  dsim.n = 700;
  dsim.tau_max_true = 40;
  std::optional<double> dsnr = 5.0;
  FitConfig dfit = default_bench_fit();
  dfit.tau_max = 40;
  PermutationTestConfig test;
  auto* bd = app.add_subcommand("bench-delays", "delay recovery against the ground truth");
  add_sim_flags(bd, dsim, dsnr);
  bd->add_option("--tau-max-true", dsim.tau_max_true, "maximum true delay")->capture_default_str();
  bd->add_option("--seed", dsim.seed, "dataset seed")->capture_default_str();
  bd->add_option("--resamples", test.resamples, "permutation test resamples")->capture_default_str();
  bd->add_option("--out", out, "output directory")->required();
  add_fit_flags(bd, dfit, true);

  // plot
  fs::path csv_in;
  PlotKind kind = PlotKind::line;
  auto* pl = app.add_subcommand("plot", "render a benchmark CSV as SVG");
  pl->add_option("--csv", csv_in, "input CSV")->required();
  pl->add_option("--kind", kind, "plot kind")->required()->transform(CLI::CheckedTransformer(kPlots, CLI::ignore_case));
  pl->add_option("--out", out, "output SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const int threads = apply_thread_env();
  json echo{{"command", app.get_subcommands().front()->get_name()}, {"threads", threads}};

  if (simulate->parsed()) {
    sim.snr_target = sim_snr;
    validate(sim);
    echo["sim"] = sim_json(sim);
    const ViewSet vs = generate_dataset(sim);
    write_dataset(out, vs, {{"generator", "mvicad simulate"}, {"sim", echo["sim"]}});
    write_json(out / "config.json", echo);
    std::cout << "wrote " << vs.m() << " views to " << out.string() << " (snr " << measure_snr(*vs.truth) << ")\n";
  } else if (fitc->parsed()) {
    fcfg.estimate_delays = !no_delays;
    const ViewSet vs = read_dataset(data_dir);
    validate(fcfg, vs);
    echo["data"] = data_dir.string();
    echo["fit"] = fit_json(fcfg);
    write_json(out / "config.json", echo);
    const FitResult r = fit(vs, fcfg);
    write_fit_result(out, r);
    std::cout << "sweeps " << r.sweeps << " converged " << r.converged << " grad " << r.final_grad_norm;
    if (vs.truth) std::cout << " amari " << mean_amari_distance(r.W, vs.truth->mixing);
    std::cout << '\n';
  } else if (ba->parsed()) {
    grid.sim.snr_target = grid_snr;
    validate(grid);
    echo["grid"] = {{"delay_levels", grid.delay_levels}, {"seeds", grid.seeds}, {"seed_base", grid.seed_base}};
    echo["sim"] = sim_json(grid.sim);
    echo["fit"] = fit_json(grid.fit);
    write_json(out / "config.json", echo);
    const AmariBenchResult r = bench_amari(grid);
    write_csv(out / "cells.csv", cells_table(r.cells));
    write_csv(out / "summary.csv", summary_table(r.summary));
    for (const auto& s : r.summary)
      std::cout << "level " << s.delay_level << ' ' << s.algorithm << ' ' << format_double(s.mean_amari) << '\n';
  } else if (bd->parsed()) {
    dsim.snr_target = dsnr;
    validate(dsim);
    echo["sim"] = sim_json(dsim);
    echo["fit"] = fit_json(dfit);
    echo["permutation_test"] = {{"resamples", test.resamples}, {"seed", test.seed}};
    write_json(out / "config.json", echo);
    const DelayBenchResult r = bench_delays(dsim, dfit, test);
    write_csv(out / "scatter.csv", scatter_table(r));
    write_csv(out / "summary.csv", delay_summary_table(r));
    std::cout << "slope " << format_double(r.report.slope) << " r2 " << format_double(r.report.r_squared)
              << " p " << format_double(r.report.p_value) << '\n';
  } else if (pl->parsed()) {
    echo["csv"] = csv_in.string();
    echo["kind"] = name_of(kPlots, kind);
    echo["out"] = out.string();
    const CsvTable t = read_csv(csv_in);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    emit_plot(t, kind, out);
    write_json(fs::path(out.string() + ".config.json"), echo);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const SingularMatrixError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
}
