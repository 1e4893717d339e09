// Copyright 2026 The privtext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "privtext/dp.h"
#include "privtext/rng.h"

namespace {

using namespace privtext;

std::vector<double> random_grad(std::size_t dim, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> g(dim);
  for (std::size_t i = 0; i < dim; ++i) g[i] = rng.gaussian_at(i);
  return g;
}

void BM_Clip(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::vector<double> grad = random_grad(dim, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clip(grad, 1.0));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(dim));
}
BENCHMARK(BM_Clip)->Arg(10)->Arg(1000)->Arg(100000);

void BM_DpSgdStep(benchmark::State& state) {
  const std::size_t dim = 10000;
  const auto lot_size = static_cast<std::size_t>(state.range(0));
  ParamVector params;
  params.values.assign(dim, 0.0);
  std::vector<PerExampleGradient> lot(lot_size);
  for (std::size_t i = 0; i < lot_size; ++i) {
    lot[i].example_id = static_cast<std::int64_t>(i);
    lot[i].grad = random_grad(dim, i + 2);
  }
  DpSgdParams p;
  p.noise_multiplier = 1.0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsgd_step(params, lot, p, seed++));
  }
}
BENCHMARK(BM_DpSgdStep)->Arg(8)->Arg(32);

}  // namespace
