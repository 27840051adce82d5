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
#include "mvicad/metrics.hpp"
#include "mvicad/simgen.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace mvicad;

TEST_CASE("amari_distance closed forms") {
  std::mt19937_64 rng(1);
  const Matrix a = Matrix::Identity(3, 3) + oracle::random_matrix(3, 3, rng, 0.3);
  CHECK(amari_distance(a.inverse(), a) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  Matrix swap(2, 2);
  swap << 0, 1,
          1, 0;
  const Matrix p = Eigen::Vector2d(3.0, -2.0).asDiagonal() * swap;
  CHECK(amari_distance(p, Matrix::Identity(2, 2)) == 0.0);

  Matrix h(2, 2);
  h << 2, 0,
       1, 1;
  CHECK(amari_distance(h, Matrix::Identity(2, 2)) == doctest::Approx(0.375));
  CHECK(oracle::direct_amari(h) == doctest::Approx(0.375));

  CHECK_THROWS_AS(amari_distance(Matrix::Identity(2, 2), Matrix::Zero(2, 2)), SingularMatrixError);
  CHECK_THROWS_AS(amari_distance(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("amari_distance against the loop formula and its invariances") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> scale(0.5, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index p = 2 + rep % 4;
    const Matrix w = oracle::random_matrix(p, p, rng);
    const Matrix a = Matrix::Identity(p, p) + oracle::random_matrix(p, p, rng, 0.5);
    const double d = amari_distance(w, a);
    CHECK(d >= 0.0);
    CHECK(d == doctest::Approx(oracle::direct_amari(w * a)).epsilon(1e-12));

    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix pi = Matrix::Zero(p, p);
    Eigen::VectorXd diag(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      pi(k, perm[static_cast<std::size_t>(k)]) = 1.0;
      diag(k) = scale(rng) < 1.75 ? -1.0 : 1.0;
    }
    // Signs and row order do not matter; general row scales do.
    CHECK(std::abs(amari_distance(diag.asDiagonal() * pi * w, a) - d) <= 1e-12);
    for (Eigen::Index k = 0; k < p; ++k) diag(k) *= scale(rng);
    CHECK(amari_distance(diag.asDiagonal() * pi * a.inverse(), a) < 1e-12);
  }
}

TEST_CASE("mean_amari_distance") {
  const std::vector<Matrix> a{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  Matrix h(2, 2);
  h << 2, 0,
       1, 1;
  CHECK(mean_amari_distance({h, Matrix::Identity(2, 2)}, a) == doctest::Approx(0.1875));
  CHECK_THROWS_AS(mean_amari_distance({h}, a), DimensionError);
}

TEST_CASE("match_permutation") {
  const SignalMatrix s = generate_sources(4, 500, 3, SourceShape{});
  SUBCASE("identity") {
    const auto m = match_permutation(s, s, 20);
    for (int k = 0; k < 4; ++k) {
      CHECK(m.perm[k] == k);
      CHECK(m.sign[k] == 1);
      CHECK(m.lag[k] == 0);
    }
  }
  SUBCASE("swap and negate") {
    SignalMatrix e = s;
    e.row(0) = s.row(2);
    e.row(2) = -s.row(0);
    const auto m = match_permutation(e, s, 0);
    CHECK(m.perm == std::vector<int>{2, 1, 0, 3});
    CHECK(m.sign == std::vector<int>{1, 1, -1, 1});
  }
  SUBCASE("per-row shifts") {
    const std::vector<long long> k{4, -7, 0, 13};
    const auto m = match_permutation(oracle::naive_shift(s, k), s, 20);
    for (int j = 0; j < 4; ++j) {
      CHECK(m.perm[j] == j);
      CHECK(m.lag[j] == k[j]);
      CHECK(m.score(j, j) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("delay_recovery_report") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(-30, 30);
  DelayTable truth(20, std::vector<int>(3));
  for (auto& r : truth)
    for (auto& v : r) v = d(rng);
  const std::vector<int> id{0, 1, 2};

  SUBCASE("exact recovery") {
    const auto rep = delay_recovery_report(truth, truth, id, {1000, 0});
    CHECK(rep.slope == doctest::Approx(1.0));
    CHECK(rep.r_squared == doctest::Approx(1.0));
    CHECK(rep.p_value == 0.0);
    CHECK(rep.true_centered.size() == 60);
  }
  SUBCASE("per-source constants are gauged away") {
    DelayTable est = truth;
    for (auto& r : est) {
      r[0] += 5;
      r[2] -= 9;
    }
    const auto rep = delay_recovery_report(est, truth, id, {1000, 0});
    CHECK(rep.slope == doctest::Approx(1.0));
    CHECK(rep.r_squared == doctest::Approx(1.0));
    for (std::size_t k = 0; k < rep.true_centered.size(); ++k)
      CHECK(rep.true_centered[k] == doctest::Approx(rep.est_centered[k]));
  }
  SUBCASE("permutation is applied") {
    DelayTable est(20, std::vector<int>(3));
    const std::vector<int> perm{2, 0, 1};  // estimated k is true perm[k]
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t k = 0; k < 3; ++k) est[i][k] = truth[i][static_cast<std::size_t>(perm[k])];
    const auto rep = delay_recovery_report(est, truth, perm, {100, 0});
    CHECK(rep.slope == doctest::Approx(1.0));
  }
  SUBCASE("centered per source") {
    const auto rep = delay_recovery_report(truth, truth, id, {10, 0});
    for (std::size_t j = 0; j < 3; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 20; ++i) mean += rep.true_centered[i * 3 + j];
      CHECK(std::abs(mean) < 1e-12);
    }
  }
  SUBCASE("unrelated delays give a large p-value") {
    DelayTable noise(20, std::vector<int>(3));
    for (auto& r : noise)
      for (auto& v : r) v = d(rng);
    const auto rep = delay_recovery_report(noise, truth, id, {2000, 1});
    CHECK(rep.p_value > 0.001);
    CHECK(rep.p_value <= 1.0);
  }
  SUBCASE("degenerate truth is flagged") {
    const DelayTable flat(5, std::vector<int>{3, 3, 3});
    const auto rep = delay_recovery_report(flat, flat, id, {10, 0});
    CHECK(rep.degenerate);
    CHECK_FALSE(rep.note.empty());
    CHECK(rep.p_value == 1.0);
  }
  SUBCASE("bad inputs") {
    CHECK_THROWS_AS(delay_recovery_report(truth, truth, {0, 0, 1}, {}), ParameterError);
    CHECK_THROWS_AS(delay_recovery_report(truth, DelayTable(3, std::vector<int>(3)), id, {}), DimensionError);
  }
}
