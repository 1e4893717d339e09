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

#ifndef PRIVTEXT_DP_H_
#define PRIVTEXT_DP_H_

#include <cstdint>
#include <span>
#include <vector>

#include "privtext/model.h"

namespace privtext {

// DP-SGD mechanism parameters. sigma = 0 disables noise (the non-private
// clipped baseline); sample_rate is the accounting rate q = lot / n.
struct DpSgdParams {
  double clip_norm = 1.0;        // C > 0
  double noise_multiplier = 0.0; // sigma >= 0
  double sample_rate = 1.0;      // q in (0, 1]
  double learning_rate = 0.1;    // eta > 0
  std::uint32_t lot_size = 1;    // L >= 1
};

// grad * min(1, C / ||grad||2); the direction is preserved and the output
// norm never exceeds C.
std::vector<double> clip(std::span<const double> grad, double clip_norm);

// In-place variant used by the training loops.
void clip_in_place(std::vector<double>& grad, double clip_norm);

double l2_norm(std::span<const double> v);

// One DP-SGD update:
//   theta' = theta - eta * (1/L) * (sum_i clip(g_i, C) + N(0, sigma^2 C^2 I))
// with L = |lot|. Clipped gradients are summed sequentially in lot order
// (callers pass lots sorted by example id) and the noise is a pure function
// of (rng_seed, coordinate), so the update is bit-reproducible.
ParamVector dpsgd_step(const ParamVector& params,
                       const std::vector<PerExampleGradient>& lot,
                       const DpSgdParams& p, std::uint64_t rng_seed);

}  // namespace privtext

#endif  // PRIVTEXT_DP_H_
