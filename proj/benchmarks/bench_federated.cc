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

#include "privtext/federated.h"
#include "privtext/synth.h"

namespace {

using namespace privtext;

void BM_FederatedRound(benchmark::State& state) {
  SyntheticSpec spec;
  spec.size = 600;
  spec.seed = 23;
  FeaturizeOptions f;
  f.feature_dim = 2048;
  const auto train = featurize(generate_synthetic(spec), f).examples;
  std::vector<Label> labels;
  for (const auto& e : train) labels.push_back(e.label);

  ModelConfig model;
  model.feature_dim = f.feature_dim;
  const auto parts =
      partition_iid(static_cast<std::uint32_t>(train.size()), 10, 1, labels);

  FederatedConfig config;
  config.num_clients = 10;
  config.client_fraction = 0.5;
  config.rounds = 1;
  config.local_lot_size = 16;

  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_federated(train, parts, config, model, train));
    config.sampling_seed++;
  }
}
BENCHMARK(BM_FederatedRound);

}  // namespace

BENCHMARK_MAIN();
