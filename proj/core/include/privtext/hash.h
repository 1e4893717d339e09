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

#ifndef PRIVTEXT_HASH_H_
#define PRIVTEXT_HASH_H_

#include <cstdint>
#include <cstring>
#include <string_view>

namespace privtext {

// 64-bit FNV-1a. This is the project-wide hash: token hashing, seed
// derivation, and parameter digests all go through it so that every
// randomized artifact is reproducible from integers and strings alone.
//
//   h = offset_basis ^ seed
//   for each byte b: h = (h ^ b) * prime
inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = 0) {
  std::uint64_t h = kFnvOffsetBasis ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Feeds the 8 little-endian bytes of `v` into an FNV-1a state.
constexpr std::uint64_t fnv1a64_u64(std::uint64_t state, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    state ^= (v >> (8 * i)) & 0xffu;
    state *= kFnvPrime;
  }
  return state;
}

// Derives an independent 64-bit seed from a base seed, a stream tag, and up
// to two integer coordinates. Every random stream in the project (shuffles,
// client sampling, noise, child runs) is keyed through this function.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = fnv1a64(tag, base);
  h = fnv1a64_u64(h, a);
  h = fnv1a64_u64(h, b);
  return h;
}

// FNV-1a over the little-endian byte image of a double array. Used for
// parameter digests in federated round records.
inline std::uint64_t digest_doubles(const double* p, std::size_t n) {
  std::uint64_t h = kFnvOffsetBasis;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &p[i], sizeof(bits));
    h = fnv1a64_u64(h, bits);
  }
  return h;
}

}  // namespace privtext

#endif  // PRIVTEXT_HASH_H_
