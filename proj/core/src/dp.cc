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

#include "privtext/dp.h"

#include <cmath>
#include <stdexcept>

#include "privtext/rng.h"

namespace privtext {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void clip_in_place(std::vector<double>& grad, double clip_norm) {
  if (!(clip_norm > 0.0)) {
    throw std::invalid_argument("clip norm must be positive");
  }
  double norm_sq = 0.0;
  for (double x : grad) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("non-finite gradient entry");
    }
    norm_sq += x * x;
  }
  const double norm = std::sqrt(norm_sq);
  if (norm <= clip_norm) return;
  const double scale = clip_norm / norm;
  for (double& x : grad) x *= scale;
}

std::vector<double> clip(std::span<const double> grad, double clip_norm) {
  std::vector<double> out(grad.begin(), grad.end());
  clip_in_place(out, clip_norm);
  return out;
}

ParamVector dpsgd_step(const ParamVector& params,
                       const std::vector<PerExampleGradient>& lot,
                       const DpSgdParams& p, std::uint64_t rng_seed) {
  if (lot.empty()) throw std::invalid_argument("empty lot");
  if (p.noise_multiplier < 0.0) {
    throw std::invalid_argument("noise multiplier must be >= 0");
  }
  if (!(p.learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }

  const std::size_t dim = params.size();
  std::vector<double> sum(dim, 0.0);
  std::vector<double> scratch;
  for (const PerExampleGradient& g : lot) {
    if (g.grad.size() != dim) {
      throw std::invalid_argument("gradient length does not match params");
    }
    scratch = g.grad;
    clip_in_place(scratch, p.clip_norm);
    for (std::size_t i = 0; i < dim; ++i) sum[i] += scratch[i];
  }

  if (p.noise_multiplier > 0.0) {
    const CounterRng noise(rng_seed);
    const double stddev = p.noise_multiplier * p.clip_norm;
    for (std::size_t i = 0; i < dim; ++i) {
      sum[i] += stddev * noise.gaussian_at(i);
    }
  }

  const double inv_lot = 1.0 / static_cast<double>(lot.size());
  ParamVector out = params;
  for (std::size_t i = 0; i < dim; ++i) {
    out.values[i] -= p.learning_rate * inv_lot * sum[i];
  }
  return out;
}

}  // namespace privtext
