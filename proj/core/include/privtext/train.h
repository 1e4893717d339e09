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

#ifndef PRIVTEXT_TRAIN_H_
#define PRIVTEXT_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "privtext/corpus.h"
#include "privtext/dp.h"
#include "privtext/model.h"

namespace privtext {

// Training produced a non-finite loss or parameter. Recorded, not fatal,
// at the experiment level.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

// Plain mean-gradient step (no clipping, no noise):
//   theta' = theta - eta * mean_i(g_i)
// summed sequentially in lot order.
ParamVector plain_sgd_step(const ParamVector& params,
                           const std::vector<PerExampleGradient>& lot,
                           double learning_rate);

struct SgdOptions {
  int epochs = 1;
  std::uint32_t lot_size = 32;
  double learning_rate = 0.1;
  // Engaged = DP-SGD (clip + noise); disengaged = plain SGD.
  std::optional<DpSgdParams> dp;
  std::uint64_t seed = 0;
};

struct SgdResult {
  ParamVector params;
  std::int64_t steps = 0;
  std::int64_t examples_used = 0;  // distinct examples (partition size)
};

// Observes each materialized lot before the step; used by tests to audit
// clipping behavior.
using LotObserver =
    std::function<void(std::int64_t step,
                       const std::vector<PerExampleGradient>& lot)>;

// Shared SGD loop for the centralized trainer and federated clients.
// Per epoch: the index set is shuffled under a seed derived from
// (seed, epoch) and cut into floor(n / L) consecutive lots of exactly
// L = min(lot_size, n); each lot is then processed in ascending example-id
// order, which keeps the gradient reduction order fixed regardless of the
// shuffle. One step per lot; DP steps draw noise keyed by the global step
// index.
SgdResult run_sgd(const ParamVector& start,
                  const std::vector<LabeledExample>& examples,
                  std::span<const std::uint32_t> indices,
                  const ModelConfig& model_config, const SgdOptions& opts,
                  const LotObserver& observer = nullptr);

}  // namespace privtext

#endif  // PRIVTEXT_TRAIN_H_
