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

#include "privtext/accountant.h"

namespace {

using namespace privtext;

void BM_RdpSubsampledGaussian(benchmark::State& state) {
  const int alpha = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdp_subsampled_gaussian(0.01, 1.1, alpha));
  }
}
BENCHMARK(BM_RdpSubsampledGaussian)->Arg(2)->Arg(64)->Arg(256);

void BM_ToEpsilon(benchmark::State& state) {
  const AccountantState acct = compose(AccountantState(), 0.05, 1.3, 500);
  for (auto _ : state) {
    benchmark::DoNotOptimize(to_epsilon(acct, 1e-5));
  }
}
BENCHMARK(BM_ToEpsilon);

void BM_CalibrateSigma(benchmark::State& state) {
  const double eps = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate_sigma({eps, 1e-5}, 0.05, 500));
  }
}
BENCHMARK(BM_CalibrateSigma)->Arg(1)->Arg(25);

}  // namespace
