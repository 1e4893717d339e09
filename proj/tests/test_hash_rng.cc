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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "privtext/hash.h"
#include "privtext/rng.h"

using namespace privtext;

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("fnv1a64 seed changes the stream") {
  CHECK(fnv1a64("token", 1) != fnv1a64("token", 2));
  CHECK(fnv1a64("token", 7) == fnv1a64("token", 7));
}

TEST_CASE("derive_seed separates streams by tag and coordinates") {
  const std::uint64_t base = 1234;
  CHECK(derive_seed(base, "split") != derive_seed(base, "noise"));
  CHECK(derive_seed(base, "noise", 0) != derive_seed(base, "noise", 1));
  CHECK(derive_seed(base, "noise", 1, 2) != derive_seed(base, "noise", 2, 1));
  CHECK(derive_seed(base, "noise", 1, 2) == derive_seed(base, "noise", 1, 2));
}

TEST_CASE("splitmix64 matches the reference sequence") {
  SplitMix64 rng0(0);
  CHECK(rng0.next_u64() == 0xe220a8397b1dcdafull);
  CHECK(rng0.next_u64() == 0x6e789e6aa1b965f4ull);
  CHECK(rng0.next_u64() == 0x06c45d188009454full);

  SplitMix64 rng42(42);
  CHECK(rng42.next_u64() == 0xbdd732262feb6e95ull);
  CHECK(rng42.next_u64() == 0x28efe333b266f103ull);
}

TEST_CASE("next_below stays in range and covers values") {
  SplitMix64 rng(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t v = rng.next_below(10);
    CHECK(v < 10);
    seen.insert(v);
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("seeded_shuffle is deterministic and a permutation") {
  std::vector<int> a(100), b(100);
  for (int i = 0; i < 100; ++i) a[i] = b[i] = i;
  seeded_shuffle(a, 99);
  seeded_shuffle(b, 99);
  CHECK(a == b);

  std::vector<int> c = a;
  std::sort(c.begin(), c.end());
  for (int i = 0; i < 100; ++i) CHECK(c[i] == i);

  std::vector<int> d(100);
  for (int i = 0; i < 100; ++i) d[i] = i;
  seeded_shuffle(d, 100);
  CHECK(d != a);
}

TEST_CASE("sample_without_replacement draws distinct in-range values") {
  const auto s = sample_without_replacement(10, 5, 3);
  CHECK(s.size() == 5);
  std::set<std::uint64_t> uniq(s.begin(), s.end());
  CHECK(uniq.size() == 5);
  for (auto v : s) CHECK(v < 10);

  CHECK(sample_without_replacement(10, 5, 3) == s);
  CHECK(sample_without_replacement(6, 6, 1).size() == 6);
  CHECK_THROWS_AS(sample_without_replacement(3, 4, 0),
                  std::invalid_argument);
}

TEST_CASE("counter rng is a pure function of (seed, index)") {
  const CounterRng a(5), b(5), c(6);
  CHECK(a.u64_at(0) == b.u64_at(0));
  CHECK(a.u64_at(123456) == b.u64_at(123456));
  CHECK(a.u64_at(0) != c.u64_at(0));
  CHECK(a.gaussian_at(17) == b.gaussian_at(17));
}

TEST_CASE("counter gaussian has unit moments") {
  const CounterRng rng(2026);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian_at(i);
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
