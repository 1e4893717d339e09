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
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "privtext/dp.h"
#include "privtext/rng.h"

using namespace privtext;

namespace {

std::vector<double> random_vector(std::size_t dim, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = rng.gaussian_at(i);
  return v;
}

PerExampleGradient grad_of(std::vector<double> g, std::int64_t id) {
  PerExampleGradient out;
  out.example_id = id;
  out.grad = std::move(g);
  out.loss = 0.5;
  return out;
}

// Independent reference for the sigma = 0 path.
ParamVector clipped_sgd_reference(const ParamVector& params,
                                  const std::vector<PerExampleGradient>& lot,
                                  double clip_norm, double lr) {
  std::vector<double> sum(params.size(), 0.0);
  for (const auto& g : lot) {
    double norm = 0.0;
    for (double x : g.grad) norm += x * x;
    norm = std::sqrt(norm);
    const double scale = norm > clip_norm ? clip_norm / norm : 1.0;
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += scale * g.grad[i];
    }
  }
  ParamVector out = params;
  for (std::size_t i = 0; i < sum.size(); ++i) {
    out.values[i] -= lr * sum[i] / static_cast<double>(lot.size());
  }
  return out;
}

}  // namespace

TEST_CASE("clip scales an out-of-ball gradient onto the sphere") {
  std::vector<double> g(100, 1.0);  // norm 10
  const auto c = clip(g, 1.0);
  CHECK(l2_norm(c) == doctest::Approx(1.0));
  for (double x : c) CHECK(x == doctest::Approx(0.1));
}

TEST_CASE("clip leaves in-ball gradients untouched") {
  std::vector<double> g = {0.3, 0.4};  // norm 0.5
  CHECK(clip(g, 1.0) == g);
  std::vector<double> zero(5, 0.0);
  CHECK(clip(zero, 1.0) == zero);
}

TEST_CASE("clip property: norm bound and preserved direction") {
  for (const std::size_t dim : {std::size_t{1}, std::size_t{10},
                                std::size_t{10000}}) {
    for (const double c : {0.1, 1.0, 10.0}) {
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto g = random_vector(dim, seed * 1000 + dim);
        const auto out = clip(g, c);
        CHECK(l2_norm(out) <= c + 1e-12);
        // Direction: out = t * g for one non-negative t.
        const double gnorm = l2_norm(g);
        if (gnorm > 0) {
          const double t = l2_norm(out) / gnorm;
          for (std::size_t i = 0; i < dim; ++i) {
            CHECK(out[i] == doctest::Approx(t * g[i]).epsilon(1e-9));
          }
        }
      }
    }
  }
}

TEST_CASE("clip rejects bad inputs") {
  std::vector<double> g = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(clip(g, 1.0), std::invalid_argument);
  std::vector<double> nan_g = {std::nan("")};
  CHECK_THROWS_AS(clip(nan_g, 1.0), std::invalid_argument);
  std::vector<double> ok = {1.0};
  CHECK_THROWS_AS(clip(ok, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(clip(ok, -1.0), std::invalid_argument);
}

TEST_CASE("dpsgd_step with sigma 0 and small gradient is plain SGD") {
  ParamVector params;
  params.values = {1.0, 2.0, 3.0};
  std::vector<PerExampleGradient> lot;
  lot.push_back(grad_of({0.1, -0.2, 0.3}, 0));  // norm < 1

  DpSgdParams p;
  p.clip_norm = 1.0;
  p.noise_multiplier = 0.0;
  p.learning_rate = 0.5;
  const ParamVector out = dpsgd_step(params, lot, p, 7);
  CHECK(out[0] == 1.0 - 0.5 * 0.1);
  CHECK(out[1] == 2.0 + 0.5 * 0.2);
  CHECK(out[2] == 3.0 - 0.5 * 0.3);
}

TEST_CASE("dpsgd_step with sigma 0 averages two clipped gradients") {
  ParamVector params;
  params.values = {0.0, 0.0};
  std::vector<PerExampleGradient> lot;
  lot.push_back(grad_of({0.6, 0.8}, 0));   // norm 1, kept
  lot.push_back(grad_of({6.0, 8.0}, 1));   // norm 10, clipped to (0.6, 0.8)

  DpSgdParams p;
  p.clip_norm = 1.0;
  p.learning_rate = 1.0;
  const ParamVector out = dpsgd_step(params, lot, p, 0);
  CHECK(out[0] == doctest::Approx(-0.6));
  CHECK(out[1] == doctest::Approx(-0.8));
}

TEST_CASE("dpsgd_step sigma 0 equals the reference clipped SGD bit-exactly") {
  ParamVector params;
  params.values = random_vector(50, 77);
  std::vector<PerExampleGradient> lot;
  for (int i = 0; i < 8; ++i) {
    lot.push_back(grad_of(random_vector(50, 100 + i), i));
  }
  DpSgdParams p;
  p.clip_norm = 0.7;
  p.learning_rate = 0.3;
  const ParamVector a = dpsgd_step(params, lot, p, 5);
  const ParamVector b = clipped_sgd_reference(params, lot, 0.7, 0.3);
  CHECK(a.values == b.values);
}

TEST_CASE("dpsgd_step is deterministic per seed") {
  ParamVector params;
  params.values.assign(20, 0.0);
  std::vector<PerExampleGradient> lot;
  lot.push_back(grad_of(random_vector(20, 3), 0));
  DpSgdParams p;
  p.noise_multiplier = 1.0;
  const ParamVector a = dpsgd_step(params, lot, p, 42);
  const ParamVector b = dpsgd_step(params, lot, p, 42);
  const ParamVector c = dpsgd_step(params, lot, p, 43);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
}

TEST_CASE("dpsgd_step noise has the advertised per-coordinate scale") {
  // Monte-Carlo oracle: sigma=1, C=1, L=100, eta=1, zero gradients. The
  // per-step parameter delta is -noise/L, so over 10000 steps each
  // coordinate's samples should have mean ~0 within 3 standard errors and
  // std within 5% of sigma*C/L = 0.01.
  const int steps = 10000;
  const int dim = 3;
  const double scale = 1.0 / 100.0;

  ParamVector zero;
  zero.values.assign(dim, 0.0);
  std::vector<PerExampleGradient> lot;
  for (int i = 0; i < 100; ++i) {
    lot.push_back(grad_of(std::vector<double>(dim, 0.0), i));
  }

  DpSgdParams p;
  p.clip_norm = 1.0;
  p.noise_multiplier = 1.0;
  p.learning_rate = 1.0;

  std::vector<std::vector<double>> samples(dim);
  for (int s = 0; s < steps; ++s) {
    const ParamVector out = dpsgd_step(zero, lot, p, 9000 + s);
    for (int d = 0; d < dim; ++d) samples[d].push_back(out[d]);
  }
  for (int d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (double v : samples[d]) mean += v;
    mean /= steps;
    double var = 0.0;
    for (double v : samples[d]) var += (v - mean) * (v - mean);
    var /= (steps - 1);
    const double std_dev = std::sqrt(var);
    CHECK(std::abs(mean) <= 3.0 * scale / std::sqrt(double(steps)));
    CHECK(std_dev == doctest::Approx(scale).epsilon(0.05));
  }
}

TEST_CASE("dpsgd_step error paths") {
  ParamVector params;
  params.values = {0.0};
  std::vector<PerExampleGradient> lot;
  lot.push_back(grad_of({1.0, 2.0}, 0));  // wrong length
  DpSgdParams p;
  CHECK_THROWS_AS(dpsgd_step(params, lot, p, 0), std::invalid_argument);

  std::vector<PerExampleGradient> empty;
  CHECK_THROWS_AS(dpsgd_step(params, empty, p, 0), std::invalid_argument);

  std::vector<PerExampleGradient> ok;
  ok.push_back(grad_of({1.0}, 0));
  p.noise_multiplier = -0.5;
  CHECK_THROWS_AS(dpsgd_step(params, ok, p, 0), std::invalid_argument);
}
