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

#include "mvicad/errors.hpp"
#include "mvicad/simgen.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <omp.h>

#include <cmath>

using namespace mvicad;

namespace {

double excess_kurtosis(const Eigen::RowVectorXd& r) {
  const double mu = r.mean();
  const Eigen::ArrayXd c = r.array() - mu;
  const double m2 = c.square().mean();
  return c.pow(4).mean() / (m2 * m2) - 3.0;
}

}  // namespace

TEST_CASE("generate_sources shape, determinism and normalization") {
  const SignalMatrix s = generate_sources(3, 700, 0, SourceShape{});
  CHECK(s.rows() == 3);
  CHECK(s.cols() == 700);
  CHECK(s == generate_sources(3, 700, 0, SourceShape{}));
  CHECK(s != generate_sources(3, 700, 1, SourceShape{}));
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(s.row(j).squaredNorm() / 700.0 == doctest::Approx(1.0));
  // Bumps vanish at both edges.
  CHECK(s.col(0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.col(699).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generate_sources respects the margin") {
  const int margin = 40;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SignalMatrix s = generate_sources(4, 300, seed, SourceShape{}, margin);
    CHECK(s.leftCols(margin).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.rightCols(margin).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("generate_sources rows are super-Gaussian") {
  int good_draws = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SignalMatrix s = generate_sources(5, 700, seed, SourceShape{});
    int positive = 0;
    for (Eigen::Index j = 0; j < 5; ++j) positive += excess_kurtosis(s.row(j)) > 0.0 ? 1 : 0;
    good_draws += positive >= 4 ? 1 : 0;
  }
  CHECK(good_draws == 100);
}

TEST_CASE("generate_sources rejects impossible shapes") {
  CHECK_THROWS_AS(generate_sources(3, 10, 0, SourceShape{}), ParameterError);
  SourceShape wide;
  wide.min_width = 200;
  wide.max_width = 300;
  CHECK_THROWS_AS(generate_sources(2, 100, 0, wide), ParameterError);
  SourceShape inverted;
  inverted.min_bumps = 3;
  inverted.max_bumps = 1;
  CHECK_THROWS_AS(generate_sources(2, 700, 0, inverted), ParameterError);
}

TEST_CASE("generate_dataset shapes and the generative identity") {
  SimConfig cfg;
  cfg.tau_max_true = 20;
  cfg.sigma = 0.3;
  cfg.seed = 4;
  const ViewSet vs = generate_dataset(cfg);
  REQUIRE(vs.truth.has_value());
  const auto& gt = *vs.truth;
  CHECK(vs.m() == 5);
  CHECK(vs.p() == 3);
  CHECK(vs.n() == 700);
  CHECK(gt.mixing.size() == 5);
  CHECK(gt.noise.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(gt.delays[i].within(20));
    CHECK(condition_number(gt.mixing[i]) < 1e3);
    std::vector<long long> tau(gt.delays[i].values().begin(), gt.delays[i].values().end());
    const SignalMatrix resid =
        gt.mixing[i].inverse() * vs.views[i] - oracle::naive_shift(gt.sources, tau) - gt.noise[i];
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("generate_dataset is deterministic and thread-count independent") {
  SimConfig cfg;
  cfg.m = 6;
  cfg.tau_max_true = 10;
  cfg.sigma = 0.5;
  cfg.seed = 42;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const ViewSet a = generate_dataset(cfg);
  omp_set_num_threads(4);
  const ViewSet b = generate_dataset(cfg);
  omp_set_num_threads(saved);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.views[i] == b.views[i]);
    CHECK(a.truth->mixing[i] == b.truth->mixing[i]);
    CHECK(a.truth->delays[i] == b.truth->delays[i]);
    CHECK(a.truth->noise[i] == b.truth->noise[i]);
  }
  CHECK(a.truth->sources == b.truth->sources);
}

TEST_CASE("zero true delays") {
  SimConfig cfg;
  cfg.seed = 7;
  const ViewSet vs = generate_dataset(cfg);
  for (const auto& t : vs.truth->delays) CHECK(t.max_abs() == 0);
}

TEST_CASE("SNR targeting and measurement") {
  SimConfig cfg;
  cfg.m = 8;
  cfg.tau_max_true = 30;
  cfg.snr_target = 5.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.seed = seed;
    const ViewSet vs = generate_dataset(cfg);
    const double snr = measure_snr(*vs.truth);
    CHECK(snr >= 4.5);
    CHECK(snr <= 5.5);
    CHECK(snr == doctest::Approx(oracle::brute_force_snr(*vs.truth)).epsilon(1e-12));
  }

  SimConfig clean;
  const ViewSet vs = generate_dataset(clean);
  CHECK(std::isinf(measure_snr(*vs.truth)));

  // Noise equal to the shifted sources: ratio exactly one.
  GroundTruth gt = *vs.truth;
  for (std::size_t i = 0; i < gt.noise.size(); ++i) gt.noise[i] = circular_shift(gt.sources, gt.delays[i]);
  CHECK(measure_snr(gt) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("SimConfig validation") {
  SimConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.m = 1;
  CHECK_THROWS_AS(validate(cfg), ParameterError);
  cfg = {};
  cfg.p = 0;
  CHECK_THROWS_AS(validate(cfg), ParameterError);
  cfg = {};
  cfg.tau_max_true = 350;
  CHECK_THROWS_AS(validate(cfg), ParameterError);
  cfg = {};
  cfg.sigma = -1.0;
  CHECK_THROWS_AS(validate(cfg), ParameterError);
  cfg = {};
  cfg.snr_target = 0.0;
  CHECK_THROWS_AS(validate(cfg), ParameterError);
}

TEST_CASE("condition_number") {
  CHECK(condition_number(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 10.0;
  d(1, 1) = 0.5;
  CHECK(condition_number(d) == doctest::Approx(20.0));
  CHECK(std::isinf(condition_number(Matrix::Zero(2, 2))));
}
