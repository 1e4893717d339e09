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

#include "privtext/train.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "privtext/hash.h"
#include "privtext/rng.h"

namespace privtext {

ParamVector plain_sgd_step(const ParamVector& params,
                           const std::vector<PerExampleGradient>& lot,
                           double learning_rate) {
  if (lot.empty()) throw std::invalid_argument("empty lot");
  const std::size_t dim = params.size();
  std::vector<double> sum(dim, 0.0);
  for (const PerExampleGradient& g : lot) {
    if (g.grad.size() != dim) {
      throw std::invalid_argument("gradient length does not match params");
    }
    for (std::size_t i = 0; i < dim; ++i) sum[i] += g.grad[i];
  }
  const double scale = learning_rate / static_cast<double>(lot.size());
  ParamVector out = params;
  for (std::size_t i = 0; i < dim; ++i) out.values[i] -= scale * sum[i];
  return out;
}

SgdResult run_sgd(const ParamVector& start,
                  const std::vector<LabeledExample>& examples,
                  std::span<const std::uint32_t> indices,
                  const ModelConfig& model_config, const SgdOptions& opts,
                  const LotObserver& observer) {
  if (indices.empty()) throw std::invalid_argument("empty training set");
  if (opts.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(opts.learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  for (std::uint32_t idx : indices) {
    if (idx >= examples.size()) {
      throw std::invalid_argument("training index out of range");
    }
  }

  const std::size_t n = indices.size();
  const std::size_t lot_size =
      std::min<std::size_t>(std::max<std::uint32_t>(opts.lot_size, 1), n);
  const std::size_t steps_per_epoch = n / lot_size;

  SgdResult result;
  result.params = start;
  result.examples_used = static_cast<std::int64_t>(n);

  std::vector<std::uint32_t> order(indices.begin(), indices.end());
  std::vector<std::uint32_t> lot_indices(lot_size);
  std::vector<PerExampleGradient> lot;
  lot.reserve(lot_size);

  std::int64_t global_step = 0;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    seeded_shuffle(order, derive_seed(opts.seed, "epoch",
                                      static_cast<std::uint64_t>(epoch)));
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      lot_indices.assign(order.begin() + s * lot_size,
                         order.begin() + (s + 1) * lot_size);
      std::sort(lot_indices.begin(), lot_indices.end());

      lot.clear();
      for (std::uint32_t idx : lot_indices) {
        lot.push_back(
            per_example_grad(result.params, examples[idx], model_config));
        if (!std::isfinite(lot.back().loss)) {
          throw DivergenceError("non-finite loss at step " +
                                std::to_string(global_step));
        }
      }
      if (observer) observer(global_step, lot);

      if (opts.dp.has_value()) {
        DpSgdParams p = *opts.dp;
        p.learning_rate = opts.learning_rate;
        p.lot_size = static_cast<std::uint32_t>(lot_size);
        result.params =
            dpsgd_step(result.params, lot, p,
                       derive_seed(opts.seed, "noise",
                                   static_cast<std::uint64_t>(global_step)));
      } else {
        result.params =
            plain_sgd_step(result.params, lot, opts.learning_rate);
      }
      ++global_step;
    }
  }
  for (double v : result.params.values) {
    if (!std::isfinite(v)) {
      throw DivergenceError("non-finite parameter after training");
    }
  }
  result.steps = global_step;
  return result;
}

}  // namespace privtext
