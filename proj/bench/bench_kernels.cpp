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

// Serial reference kernels against the OpenMP kernels, over signal length.
// Thread count follows MVICAD_THREADS (default: OpenMP's choice).

#include "mvicad/kernels.hpp"
#include "mvicad/threads.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace mvicad;

struct Inputs {
  Matrix w;
  SignalMatrix x, z, m_other;
};

Inputs make_inputs(Eigen::Index p, Eigen::Index n) {
  std::mt19937_64 rng(0);
  std::normal_distribution<double> g(0.0, 1.0);
  auto fill = [&](Eigen::Index r, Eigen::Index c) {
    SignalMatrix s(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index t = 0; t < c; ++t) s(i, t) = g(rng);
    return s;
  };
  Inputs in;
  in.w = Matrix::Identity(p, p) + 0.1 * Matrix(fill(p, p));
  in.x = fill(p, n);
  in.z = fill(p, n);
  in.m_other = fill(p, n);
  return in;
}

template <bool Parallel>
void BM_unmix(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), state.range(1));
  SignalMatrix out;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::parallel::unmix(in.w, in.x, out);
    else kernels::serial::unmix(in.w, in.x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

template <bool Parallel>
void BM_loss_sums(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), state.range(1));
  for (auto _ : state) {
    const auto s = Parallel ? kernels::parallel::loss_sums(in.z, in.m_other, 5.0, Density::logcosh)
                            : kernels::serial::loss_sums(in.z, in.m_other, 5.0, Density::logcosh);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

template <bool Parallel>
void BM_grad_sums(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), state.range(1));
  for (auto _ : state) {
    const auto s = Parallel ? kernels::parallel::grad_sums(in.z, in.m_other, 5.0, Density::logcosh)
                            : kernels::serial::grad_sums(in.z, in.m_other, 5.0, Density::logcosh);
    benchmark::DoNotOptimize(s.resid_z.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void shapes(benchmark::internal::Benchmark* b) {
  for (long n : {700, 4096, 32768}) b->Args({5, n});
  b->Args({20, 4096});
}

BENCHMARK(BM_unmix<false>)->Name("unmix/serial")->Apply(shapes);
BENCHMARK(BM_unmix<true>)->Name("unmix/parallel")->Apply(shapes);
BENCHMARK(BM_loss_sums<false>)->Name("loss_sums/serial")->Apply(shapes);
BENCHMARK(BM_loss_sums<true>)->Name("loss_sums/parallel")->Apply(shapes);
BENCHMARK(BM_grad_sums<false>)->Name("grad_sums/serial")->Apply(shapes);
BENCHMARK(BM_grad_sums<true>)->Name("grad_sums/parallel")->Apply(shapes);

}  // namespace

int main(int argc, char** argv) {
  const int threads = mvicad::apply_thread_env();
  benchmark::AddCustomContext("omp_threads", std::to_string(threads));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
