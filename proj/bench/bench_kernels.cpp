// Copyright 2026 The blearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Serial reference vs OpenMP kernels. The second argument of every case is
// the execution policy: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bl/gibbs.hpp"
#include "bl/training.hpp"

namespace bl {
namespace {

Exec policy(const benchmark::State& state) { return state.range(1) ? Exec::kParallel : Exec::kSerial; }

GibbsModel scalar_model(std::size_t width) {
  NetworkSpec s;
  s.x_dim = 4;
  s.y_dim = 2;
  s.style = HeadStyle::kIBL;
  s.layers = {LayerArch{width, {2, 2, {}}, {1, 2, {}}, {1, 2, {}}}, LayerArch{4, {1, 2, {}}, {1, 1, {}}, {1, 1, {}}}};
  Network net(s);
  initialize(net, 1, InitConfig{.sigma_params = 0.1});
  return GibbsModel(std::move(net), 1.0);
}

std::vector<Example> batch(std::size_t n) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.7);
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Example{{g(rng), g(rng), g(rng), g(rng)}, -1, {g(rng), g(rng)}, i});
  return out;
}

void BM_DsmLossAndGradient(benchmark::State& state) {
  const GibbsModel model = scalar_model(8);
  const auto data = batch(static_cast<std::size_t>(state.range(0)));
  const LossConfig cfg{0.0, 1.0, 0.3, false};
  for (auto _ : state) benchmark::DoNotOptimize(hybrid_loss(model, cfg, data, 3, policy(state), true));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DsmLossAndGradient)->ArgsProduct({{256, 2048}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_LangevinSample(benchmark::State& state) {
  const GibbsModel model = scalar_model(4);
  LangevinConfig cfg;
  cfg.step_size = 1e-3;
  cfg.n_steps = 200;
  cfg.burn_in = 0;
  cfg.n_chains = static_cast<std::size_t>(state.range(0));
  const std::vector<double> x{0.1, -0.2, 0.3, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(langevin_sample(model, x, cfg, policy(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_LangevinSample)->ArgsProduct({{64, 512}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_QuadratureLogPartition(benchmark::State& state) {
  const GibbsModel model = scalar_model(4);
  const std::vector<double> x{0.1, -0.2, 0.3, 0.0}, lo{-4.0, -4.0}, hi{4.0, 4.0};
  const auto points = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_partition_quadrature(model, x, lo, hi, points, policy(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_QuadratureLogPartition)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ConstraintDiagnostic(benchmark::State& state) {
  LangevinConfig cfg;
  cfg.n_steps = 300;
  cfg.burn_in = 100;
  cfg.n_chains = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(constraint_diagnostic(16, 1.0, 1.0, cfg, 0.1, ResidualScale::kSum, policy(state)));
  }
}
BENCHMARK(BM_ConstraintDiagnostic)->ArgsProduct({{128, 512}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace bl

BENCHMARK_MAIN();
