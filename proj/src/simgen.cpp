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

#include "mvicad/simgen.hpp"

#include "mvicad/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace mvicad {

namespace {

enum Stream : std::uint64_t { kSources = 0, kDelays = 1, kFirstView = 2 };

// Independent generator per (seed, stream) so per-view draws do not depend on
// the order or thread in which views are generated.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6d766963u};
  return std::mt19937_64(seq);
}

double laplace(std::mt19937_64& rng, double scale) {
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  const double mag = scale * expo(rng);
  return coin(rng) ? mag : -mag;
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.m < 2) throw ParameterError("m must be at least 2");
  if (cfg.p < 1) throw ParameterError("p must be at least 1");
  if (cfg.n < 16) throw ParameterError("n must be at least 16");
  if (cfg.tau_max_true < 0) throw ParameterError("tau_max_true must be non-negative");
  if (cfg.n <= 2 * cfg.tau_max_true) throw ParameterError("n must exceed 2 * tau_max_true");
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma))
    throw ParameterError("sigma must be finite and non-negative");
  if (cfg.snr_target && !(*cfg.snr_target > 0.0 && std::isfinite(*cfg.snr_target)))
    throw ParameterError("snr_target must be positive and finite");
  if (!(cfg.max_condition > 1.0)) throw ParameterError("max_condition must exceed 1");
}

void validate(const ViewSet& vs) {
  if (vs.views.empty()) throw ParameterError("view set is empty");
  const auto p = vs.views.front().rows();
  const auto n = vs.views.front().cols();
  for (const auto& x : vs.views) {
    validate_signal(x);
    if (x.rows() != p) throw DimensionError("rows", static_cast<std::size_t>(p),
                                            static_cast<std::size_t>(x.rows()));
    if (x.cols() != n) throw DimensionError("cols", static_cast<std::size_t>(n),
                                            static_cast<std::size_t>(x.cols()));
  }
}

SignalMatrix generate_sources(int p, int n, std::uint64_t seed, const SourceShape& shape,
                              int margin) {
  if (p < 1) throw ParameterError("p must be at least 1");
  if (n < 16) throw ParameterError("n must be at least 16");
  if (shape.min_bumps < 1 || shape.max_bumps < shape.min_bumps)
    throw ParameterError("bump count range is empty");
  if (shape.min_width < 2 || shape.max_width < shape.min_width)
    throw ParameterError("bump width range is invalid");
  if (!(shape.amplitude_scale > 0.0)) throw ParameterError("amplitude scale must be positive");
  // The widest bump must fit between the margins.
  if (2 * margin + shape.max_width >= n)
    throw ParameterError("signal too short for the requested bump widths and margin");

  auto rng = substream(seed, kSources);
  std::uniform_int_distribution<int> count_dist(shape.min_bumps, shape.max_bumps);
  std::uniform_int_distribution<int> width_dist(shape.min_width, shape.max_width);

  SignalMatrix s = SignalMatrix::Zero(p, n);
  for (int j = 0; j < p; ++j) {
    const int bumps = count_dist(rng);
    for (int b = 0; b < bumps; ++b) {
      const int width = width_dist(rng);
      const int half = width / 2;
      std::uniform_int_distribution<int> center_dist(margin + half, n - 1 - margin - half);
      const int center = center_dist(rng);
      const double amp = laplace(rng, shape.amplitude_scale);
      for (int t = center - half; t <= center + half; ++t) {
        // Exactly zero at both ends of the support.
        const double phase = std::numbers::pi * (t - center) / half;
        s(j, t) += amp * 0.5 * (1.0 + std::cos(phase));
      }
    }
    const double power = s.row(j).squaredNorm() / n;
    s.row(j) /= std::sqrt(power);
  }
  return s;
}

double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

ViewSet generate_dataset(const SimConfig& cfg) {
  validate(cfg);
  const int m = cfg.m, p = cfg.p, n = cfg.n;

  GroundTruth gt;
  gt.sources = generate_sources(p, n, cfg.seed, cfg.shape, cfg.tau_max_true);

  auto delay_rng = substream(cfg.seed, kDelays);
  std::uniform_int_distribution<int> delay_dist(-cfg.tau_max_true, cfg.tau_max_true);
  for (int i = 0; i < m; ++i) {
    std::vector<int> d(static_cast<std::size_t>(p));
    for (auto& v : d) v = delay_dist(delay_rng);
    gt.delays.emplace_back(std::move(d), n);
  }

  gt.mixing.resize(static_cast<std::size_t>(m));
  gt.noise.resize(static_cast<std::size_t>(m));
  std::vector<SignalMatrix> shifted(static_cast<std::size_t>(m));
  const double unit = cfg.snr_target ? 1.0 : cfg.sigma;

#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    auto rng = substream(cfg.seed, kFirstView + static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(p, p);
    do {
      for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) a(r, c) = normal(rng);
    } while (!(condition_number(a) < cfg.max_condition));
    gt.mixing[ui] = a;

    SignalMatrix noise(p, n);
    for (int r = 0; r < p; ++r)
      for (int t = 0; t < n; ++t) noise(r, t) = unit * normal(rng);
    gt.noise[ui] = std::move(noise);
    shifted[ui] = circular_shift(gt.sources, gt.delays[ui]);
  }

  if (cfg.snr_target) {
    // Pick sigma so that the mean per-view power ratio hits the target exactly.
    double ratio_sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      ratio_sum += shifted[ui].squaredNorm() / gt.noise[ui].squaredNorm();
    }
    const double sigma = std::sqrt(ratio_sum / m / *cfg.snr_target);
    for (auto& nz : gt.noise) nz *= sigma;
  }

  ViewSet vs;
  vs.views.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    vs.views[ui].noalias() = gt.mixing[ui] * (shifted[ui] + gt.noise[ui]);
  }
  vs.truth = std::move(gt);
  return vs;
}

double measure_snr(const GroundTruth& gt) {
  if (gt.noise.size() != gt.delays.size() || gt.noise.empty())
    throw ParameterError("noise realizations are required to measure SNR");
  double total = 0.0;
  for (std::size_t i = 0; i < gt.noise.size(); ++i) {
    const double noise_power = gt.noise[i].squaredNorm();
    if (noise_power == 0.0) return std::numeric_limits<double>::infinity();
    total += circular_shift(gt.sources, gt.delays[i]).squaredNorm() / noise_power;
  }
  return total / static_cast<double>(gt.noise.size());
}

}  // namespace mvicad
