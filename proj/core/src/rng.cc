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

#include "privtext/rng.h"

#include <numeric>
#include <stdexcept>

namespace privtext {

std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n,
                                                      std::uint64_t k,
                                                      std::uint64_t seed) {
  if (k > n) throw std::invalid_argument("sample size exceeds population");
  std::vector<std::uint64_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  SplitMix64 rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng.next_below(n - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace privtext
