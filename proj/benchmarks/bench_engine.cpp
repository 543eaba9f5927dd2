// Copyright 2026 The flexload Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "flexload/fleet_sim.hpp"
#include "flexload/oracle.hpp"
#include "flexload/threshold_engine.hpp"

namespace {

using namespace flexload;
using D = InnovationDistribution;

PriceModel gaussian_model(int T) {
  const auto base = fleet::SimConfig::synthetic_default();
  std::vector<StageInnovations> stages;
  for (int t = 0; t < T; ++t) {
    const double mean = base.prices.energy_mean[static_cast<std::size_t>(t) % 24];
    stages.push_back({D::gaussian(mean, base.prices.energy_stddev),
                      D::point_mass(1.0 + 0.1 * mean), {}});
  }
  return PriceModel(std::move(stages));
}

PriceModel empirical_model(int T) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(10.0, 60.0);
  std::vector<StageInnovations> stages;
  for (int t = 0; t < T; ++t) {
    std::vector<WeightedValue> atoms;
    for (int k = 0; k < 16; ++k) atoms.push_back({u(rng), 1.0});
    stages.push_back({D::empirical(atoms), D::point_mass(2.0), {}});
  }
  return PriceModel(std::move(stages));
}

void BM_CompileGaussian(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const PriceModel model = gaussian_model(T);
  const LoadSpec spec{0.0, 1.0, T, 120.0};
  for (auto _ : state) benchmark::DoNotOptimize(compile_independent(spec, model));
  state.SetComplexityN(T);
}
BENCHMARK(BM_CompileGaussian)->RangeMultiplier(2)->Range(25, 800)->Complexity(benchmark::oNSquared);

void BM_CompileEmpirical(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const PriceModel model = empirical_model(T);
  const LoadSpec spec{0.0, 1.0, T, 120.0};
  for (auto _ : state) benchmark::DoNotOptimize(compile_independent(spec, model));
  state.SetComplexityN(T);
}
BENCHMARK(BM_CompileEmpirical)->RangeMultiplier(2)->Range(25, 800)->Complexity(benchmark::oNSquared);

// Parallel rows pay off only once T is large.
void BM_CompileGaussianPool(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const PriceModel model = gaussian_model(T);
  const LoadSpec spec{0.0, 1.0, T, 120.0};
  WorkerPool pool;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compile_independent(spec, model, CompileOptions{&pool}));
  }
}
BENCHMARK(BM_CompileGaussianPool)->Arg(200)->Arg(800);

void BM_CompileCorrelated(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  std::vector<StageInnovations> stages;
  for (int t = 0; t < T; ++t) stages.push_back({D::gaussian(0, 4), D::point_mass(2), {}});
  const PriceModel model(stages, std::vector<AffineSeasonality>(T, {12, 0.6, 0, 0}), {30, 0});
  CorrelatedOptions opts;
  opts.grid_delta = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(compile_correlated({0, 1, T, 120}, model, opts));
}
BENCHMARK(BM_CompileCorrelated)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BruteForceDp(benchmark::State& state) {
  std::mt19937_64 rng(9);
  oracle::RandomOptions opts;
  opts.max_horizon = static_cast<int>(state.range(0));
  const auto inst = oracle::random_independent(rng, opts);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::solve_dp(inst));
}
BENCHMARK(BM_BruteForceDp)->Arg(4)->Arg(6);

void BM_FleetRun(benchmark::State& state) {
  auto config = fleet::SimConfig::synthetic_default();
  config.n_scenarios = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fleet::run(config));
}
BENCHMARK(BM_FleetRun)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
