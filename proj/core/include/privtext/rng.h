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

#ifndef PRIVTEXT_RNG_H_
#define PRIVTEXT_RNG_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace privtext {

// SplitMix64 (Steele, Lea & Flood; the java.util.SplittableRandom mixer).
// Used in two forms:
//  - SplitMix64: a tiny sequential generator for shuffles and sampling.
//  - CounterRng: the stateless counter form value(i) = mix(seed + (i+1)*gamma),
//    which makes coordinate-wise Gaussian noise a pure function of
//    (seed, coordinate). A run is therefore reproducible regardless of how
//    work is scheduled across threads.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    return splitmix64_mix(state_);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound). bound > 0. Rejection-free Lemire-style reduction
  // is overkill here; the modulo bias at 64 bits is far below any statistic
  // this project measures, but we keep the unbiased path anyway.
  std::uint64_t next_below(std::uint64_t bound) {
    // Unbiased via rejection sampling on the top range.
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

// In-place seeded Fisher-Yates shuffle.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// k distinct values from [0, n), uniform without replacement, in the order
// drawn (partial Fisher-Yates over an index table).
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n,
                                                      std::uint64_t k,
                                                      std::uint64_t seed);

// Stateless counter generator: independent draws addressed by index.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t u64_at(std::uint64_t index) const {
    return splitmix64_mix(seed_ + (index + 1) * kGoldenGamma);
  }

  // Uniform in (0, 1]; the open-at-zero side keeps log() finite below.
  double unit_at(std::uint64_t index) const {
    return (static_cast<double>(u64_at(index) >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on the counter pair (2i, 2i+1).
  double gaussian_at(std::uint64_t index) const {
    const double u1 = unit_at(2 * index);
    const double u2 = unit_at(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace privtext

#endif  // PRIVTEXT_RNG_H_
