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
#include "mvicad/csv.hpp"
#include "mvicad/dataset_io.hpp"
#include "mvicad/errors.hpp"
#include "mvicad/plot.hpp"
#include "mvicad/threads.hpp"

#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

using namespace mvicad;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("mvicad_test_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t hits = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++hits;
  return hits;
}

ViewSet small_dataset() {
  SimConfig sim;
  sim.m = 3;
  sim.p = 2;
  sim.n = 200;
  sim.tau_max_true = 5;
  sim.sigma = 0.2;
  sim.seed = 9;
  return generate_dataset(sim);
}

}  // namespace

TEST_CASE("dataset round trip is bit exact") {
  TempDir tmp("roundtrip");
  const ViewSet vs = small_dataset();
  write_dataset(tmp.path, vs, {{"seed", 9}});
  const ViewSet back = read_dataset(tmp.path);
  REQUIRE(back.m() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.views[i] == vs.views[i]);
  REQUIRE(back.truth.has_value());
  CHECK(back.truth->sources == vs.truth->sources);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.truth->mixing[i] == vs.truth->mixing[i]);
    CHECK(back.truth->delays[i] == vs.truth->delays[i]);
    CHECK(back.truth->noise[i] == vs.truth->noise[i]);
  }
}

TEST_CASE("raw files are little-endian float64, row-major") {
  TempDir tmp("raw");
  SignalMatrix x(2, 3);
  x << 1, 2, 3,
       4, 5, 6;
  ViewSet vs;
  vs.views = {x, x};
  write_dataset(tmp.path, vs);
  std::ifstream in(tmp.path / "view_000.bin", std::ios::binary);
  REQUIRE(in);
  unsigned char bytes[48];
  in.read(reinterpret_cast<char*>(bytes), 48);
  REQUIRE(in.gcount() == 48);
  // 2.0 = 0x4000000000000000, second value in row-major order.
  for (int b = 0; b < 7; ++b) CHECK(bytes[8 + b] == 0);
  CHECK(bytes[15] == 0x40);
  // 4.0 = 0x4010000000000000, fourth value (start of the second row).
  CHECK(bytes[24 + 7] == 0x40);
  CHECK(bytes[24 + 6] == 0x10);
}

TEST_CASE("dataset read errors") {
  TempDir tmp("errors");
  const ViewSet vs = small_dataset();
  write_dataset(tmp.path, vs);

  SUBCASE("truncated view names the file") {
    fs::resize_file(tmp.path / "view_001.bin", 100);
    try {
      (void)read_dataset(tmp.path);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::size_mismatch);
      CHECK(std::string(e.what()).find("view_001.bin") != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    fs::remove(tmp.path / "view_002.bin");
    try {
      (void)read_dataset(tmp.path);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::missing_file);
    }
  }
  SUBCASE("missing manifest") {
    fs::remove(tmp.path / "manifest.json");
    CHECK_THROWS_AS(read_dataset(tmp.path), DataError);
  }
  SUBCASE("manifest with m = 0") {
    auto j = to_json(manifest_from_json(nlohmann::json::parse(std::ifstream(tmp.path / "manifest.json"))));
    j["m"] = 0;
    std::ofstream(tmp.path / "manifest.json", std::ios::trunc) << j.dump();
    try {
      (void)read_dataset(tmp.path);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::validation);
    }
  }
  SUBCASE("non-finite samples") {
    // write_dataset refuses NaN, so patch the raw bytes.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::fstream f(tmp.path / "view_000.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8 * 17);
    f.write(reinterpret_cast<const char*>(&nan), sizeof nan);
    f.close();
    try {
      (void)read_dataset(tmp.path);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::non_finite);
    }
  }
}

TEST_CASE("fit result round trip") {
  TempDir tmp("fit");
  const ViewSet vs = small_dataset();
  FitConfig cfg;
  cfg.tau_max = 5;
  cfg.max_sweeps = 20;
  const FitResult r = fit(vs, cfg);
  write_fit_result(tmp.path, r);
  const FitResult back = read_fit_result(tmp.path);
  REQUIRE(back.W.size() == r.W.size());
  for (std::size_t i = 0; i < r.W.size(); ++i) {
    CHECK(back.W[i] == r.W[i]);
    CHECK(back.tau[i] == r.tau[i]);
  }
  CHECK(back.shared_sources == r.shared_sources);
  CHECK(back.sweeps == r.sweeps);
  CHECK(back.converged == r.converged);
}

TEST_CASE("csv") {
  SUBCASE("doubles survive formatting") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1e3);
    for (int k = 0; k < 1000; ++k) {
      const double v = g(rng);
      CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(std::isinf(parse_double(format_double(INFINITY))));
  }
  SUBCASE("text round trip with LF endings") {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{"1", "x y"}, {"2.5", ""}};
    const std::string text = to_string(t);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text == "a,b\n1,x y\n2.5,\n");
    const CsvTable back = parse_csv(text);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.column("b") == 1);
    CHECK_THROWS_AS(back.column("c"), DataError);
  }
  SUBCASE("sanitize") {
    CHECK(sanitize_field("a,b\n\"c\"").find_first_of(",\n\"") == std::string::npos);
  }
  SUBCASE("ragged rows are rejected") {
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), DataError);
  }
}

TEST_CASE("plots") {
  SUBCASE("line plot: one polyline per algorithm") {
    CsvTable t;
    t.header = {"delay_level", "algorithm", "mean_amari", "count"};
    for (int level : {0, 10, 20}) {
      t.rows.push_back({std::to_string(level), "mvicad", "0.03", "10"});
      t.rows.push_back({std::to_string(level), "mvica", format_double(0.03 + 0.01 * level), "10"});
    }
    const std::string svg = render_plot(t, PlotKind::line);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count(svg, "<polyline") == 2);
    CHECK(svg.find("mvicad") != std::string::npos);
    CHECK(svg == render_plot(t, PlotKind::line));
  }
  SUBCASE("scatter plot: one circle per pair and a fitted line") {
    CsvTable t;
    t.header = {"view", "source", "true_delay_centered", "est_delay_centered"};
    for (int k = 0; k < 200; ++k)
      t.rows.push_back({std::to_string(k / 5), std::to_string(k % 5), std::to_string(k % 17 - 8),
                        std::to_string(k % 17 - 8 + k % 3 - 1)});
    const std::string svg = render_plot(t, PlotKind::scatter);
    CHECK(count(svg, "<circle") == 200);
    CHECK(count(svg, "class=\"fit\"") == 1);
  }
  SUBCASE("empty input") {
    CsvTable t;
    t.header = {"view", "source", "true_delay_centered", "est_delay_centered"};
    CHECK_THROWS_AS(render_plot(t, PlotKind::scatter), DataError);
  }
  SUBCASE("emit writes the file") {
    TempDir tmp("plot");
    CsvTable t;
    t.header = {"delay_level", "algorithm", "mean_amari", "count"};
    t.rows.push_back({"0", "mvicad", "0.1", "1"});
    t.rows.push_back({"10", "mvicad", "0.2", "1"});
    emit_plot(t, PlotKind::line, tmp.path / "a.svg");
    CHECK(fs::file_size(tmp.path / "a.svg") > 0);
  }
}

TEST_CASE("bench_amari: both algorithms coincide at level zero") {
  ExperimentGrid grid;
  grid.delay_levels = {0, 10};
  grid.seeds = 2;
  grid.sim.m = 3;
  grid.sim.p = 2;
  grid.sim.n = 300;
  grid.fit.max_sweeps = 100;
  const auto r = bench_amari(grid);
  REQUIRE(r.cells.size() == 8);
  REQUIRE(r.summary.size() == 4);
  for (const auto& c : r.cells) CHECK(c.error.empty());
  for (std::size_t k = 0; k + 1 < r.cells.size(); k += 2) {
    if (r.cells[k].delay_level != 0) continue;
    CHECK(r.cells[k].amari == r.cells[k + 1].amari);
    CHECK(r.cells[k].algorithm != r.cells[k + 1].algorithm);
  }
  const auto table = summary_table(r.summary);
  CHECK(table.header == std::vector<std::string>{"delay_level", "algorithm", "mean_amari", "count"});
  CHECK(cells_table(r.cells).rows.size() == 8);
}

TEST_CASE("bench_delays scatter size and the zero-delay case") {
  SUBCASE("m x p points") {
    SimConfig sim = default_bench_sim();
    sim.m = 10;
    sim.p = 3;
    sim.tau_max_true = 10;
    FitConfig f = default_bench_fit();
    f.tau_max = 10;
    f.max_sweeps = 100;
    const auto r = bench_delays(sim, f, {100, 0});
    CHECK(r.rows.size() == 30);
    CHECK(scatter_table(r).rows.size() == 30);
    CHECK(delay_summary_table(r).rows.size() == 1);
  }
  SUBCASE("no noise, no delays: every point at the origin") {
    SimConfig sim;
    sim.m = 4;
    sim.p = 2;
    FitConfig f = default_bench_fit();
    f.tau_max = 5;
    const auto r = bench_delays(sim, f, {100, 0});
    CHECK(r.report.degenerate);
    for (const auto& row : r.rows) {
      CHECK(row.true_centered == 0.0);
      CHECK(row.est_centered == 0.0);
    }
  }
}

TEST_CASE("thread cap parsing") {
  CHECK(parse_thread_cap("4") == 4);
  CHECK(parse_thread_cap("1") == 1);
  CHECK_FALSE(parse_thread_cap("0"));
  CHECK_FALSE(parse_thread_cap("-2"));
  CHECK_FALSE(parse_thread_cap("four"));
  CHECK_FALSE(parse_thread_cap("3x"));
  CHECK_FALSE(parse_thread_cap(""));

  const int saved = max_threads();
  ::setenv(kThreadsEnv, "2", 1);
  CHECK(apply_thread_env() == 2);
  ::setenv(kThreadsEnv, "junk", 1);
  CHECK(apply_thread_env() == 2);
  ::unsetenv(kThreadsEnv);
  omp_set_num_threads(saved);
}
