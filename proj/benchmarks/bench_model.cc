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

#include "privtext/corpus.h"
#include "privtext/model.h"
#include "privtext/synth.h"

namespace {

using namespace privtext;

std::vector<LabeledExample> featurized_examples(std::size_t n,
                                                const FeaturizeOptions& f) {
  SyntheticSpec spec;
  spec.size = n;
  spec.seed = 17;
  return featurize(generate_synthetic(spec), f).examples;
}

void BM_LinearGrad(benchmark::State& state) {
  FeaturizeOptions f;
  f.feature_dim = 4096;
  const auto examples = featurized_examples(64, f);
  ModelConfig config;
  config.feature_dim = f.feature_dim;
  const ParamVector params = init_params(config);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        per_example_grad(params, examples[i++ % examples.size()], config));
  }
}
BENCHMARK(BM_LinearGrad);

void BM_TransformerForward(benchmark::State& state) {
  FeaturizeOptions f;
  f.feature_dim = 4096;
  f.vocab_hash_dim = 512;
  f.max_tokens = 16;
  const auto examples = featurized_examples(64, f);
  ModelConfig config;
  config.kind = ModelKind::kTinyTransformer;
  config.vocab_hash_dim = f.vocab_hash_dim;
  config.max_tokens = f.max_tokens;
  config.embed_dim = 16;
  config.num_heads = 2;
  config.ff_dim = 32;
  const ParamVector params = init_params(config);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        forward(params, examples[i++ % examples.size()], config));
  }
}
BENCHMARK(BM_TransformerForward);

void BM_TransformerGrad(benchmark::State& state) {
  FeaturizeOptions f;
  f.feature_dim = 4096;
  f.vocab_hash_dim = 512;
  f.max_tokens = 16;
  const auto examples = featurized_examples(64, f);
  ModelConfig config;
  config.kind = ModelKind::kTinyTransformer;
  config.vocab_hash_dim = f.vocab_hash_dim;
  config.max_tokens = f.max_tokens;
  config.embed_dim = 16;
  config.num_heads = 2;
  config.ff_dim = 32;
  const ParamVector params = init_params(config);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        per_example_grad(params, examples[i++ % examples.size()], config));
  }
}
BENCHMARK(BM_TransformerGrad);

}  // namespace
