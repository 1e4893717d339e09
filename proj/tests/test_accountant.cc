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
#include <vector>

#include "doctest.h"
#include "privtext/accountant.h"

using namespace privtext;

namespace {

struct OraclePoint {
  double q;
  double sigma;
  int alpha;
  double expected;  // 50-digit arithmetic, recorded to 12 significant digits
};

// Frozen values from a high-precision evaluation of the binomial-expansion
// bound; see the q=1 closed form for the two exact entries.
const OraclePoint kOraclePoints[] = {
    {0.01, 1.0, 2, 0.000171813422075},
    {0.01, 1.0, 4, 0.000363154048911},
    {0.01, 1.0, 16, 3.08785078370},
    {0.01, 1.0, 64, 27.3217318746},
    {0.01, 2.0, 8, 0.000115756147930},
    {0.05, 1.0, 2, 0.00428650437042},
    {0.05, 1.0, 8, 0.601268913989},
    {0.05, 2.0, 32, 0.916369609562},
    {0.1, 0.5, 2, 0.429169590598},
    {0.1, 1.0, 3, 0.0317123003034},
    {0.1, 1.0, 32, 13.6231379685},
    {0.1, 4.0, 64, 0.0379998859062},
    {0.2, 1.5, 16, 1.84435854099},
    {0.5, 1.0, 2, 0.357374019509},
    {0.5, 1.0, 8, 3.20887926097},
    {0.5, 2.0, 64, 7.29585063003},
    {0.9, 1.0, 4, 1.86698203771},
    {1.0, 1.0, 2, 1.0},
    {1.0, 2.0, 16, 2.0},
    {0.001, 1.0, 2, 1.71828035221e-6},
    {0.02, 0.5, 128, 252.057173664},
    {0.3, 0.7, 256, 260.015795530},
};

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace

TEST_CASE("q=1 reduces to the plain Gaussian mechanism exactly") {
  for (const double sigma : {0.5, 1.0, 2.0, 10.0}) {
    for (int alpha = 2; alpha <= 64; ++alpha) {
      const double expected = alpha / (2.0 * sigma * sigma);
      CHECK(std::abs(rdp_subsampled_gaussian(1.0, sigma, alpha) - expected)
            <= 1e-12 * expected);
    }
  }
  CHECK(rdp_subsampled_gaussian(1.0, 1.0, 2) == doctest::Approx(1.0));
}

TEST_CASE("q=0 costs nothing") {
  for (int alpha : {2, 8, 64, 256}) {
    CHECK(rdp_subsampled_gaussian(0.0, 1.0, alpha) == 0.0);
  }
}

TEST_CASE("subsampled Gaussian matches the high-precision oracle") {
  for (const OraclePoint& pt : kOraclePoints) {
    const double got = rdp_subsampled_gaussian(pt.q, pt.sigma, pt.alpha);
    CHECK(rel_err(got, pt.expected) < 1e-8);
  }
}

TEST_CASE("rdp input validation") {
  CHECK_THROWS_AS(rdp_subsampled_gaussian(0.1, 0.0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(rdp_subsampled_gaussian(0.1, -1.0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(rdp_subsampled_gaussian(-0.1, 1.0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(rdp_subsampled_gaussian(1.1, 1.0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(rdp_subsampled_gaussian(0.1, 1.0, 1),
                  std::invalid_argument);
}

TEST_CASE("rdp values stay finite and non-negative over the safe domain") {
  for (const double sigma : {0.3, 0.5, 1.0, 10.0, 100.0}) {
    for (const double q : {0.0, 1e-6, 0.01, 0.5, 0.999, 1.0}) {
      for (const int alpha : {2, 32, 64, 128, 256}) {
        const double v = rdp_subsampled_gaussian(q, sigma, alpha);
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
      }
    }
  }
}

TEST_CASE("compose accumulates linearly and exactly") {
  AccountantState s;
  CHECK(s.steps_recorded() == 0);

  const AccountantState unchanged = compose(s, 0.05, 1.0, 0);
  CHECK(unchanged.steps_recorded() == 0);
  CHECK(unchanged.rdp_totals() == s.rdp_totals());

  const AccountantState split =
      compose(compose(AccountantState(), 0.05, 1.0, 120), 0.05, 1.0, 380);
  const AccountantState merged = compose(AccountantState(), 0.05, 1.0, 500);
  CHECK(split.steps_recorded() == 500);
  CHECK(split.rdp_totals() == merged.rdp_totals());  // exact, not approx

  const auto t100 = compose(AccountantState(), 0.05, 1.0, 100).rdp_totals();
  const auto t200 = compose(AccountantState(), 0.05, 1.0, 200).rdp_totals();
  for (std::size_t i = 0; i < t100.size(); ++i) {
    CHECK(t200[i] > t100[i]);  // strictly increasing with steps
  }
}

TEST_CASE("composition is order-independent across segments") {
  AccountantState a;
  a.add_steps(0.05, 1.0, 100);
  a.add_steps(0.1, 2.0, 50);
  AccountantState b;
  b.add_steps(0.1, 2.0, 50);
  b.add_steps(0.05, 1.0, 100);
  CHECK(a.rdp_totals() == b.rdp_totals());
  CHECK(a.steps_recorded() == b.steps_recorded());
}

TEST_CASE("to_epsilon: single Gaussian step lands on the alpha=6 minimum") {
  const AccountantState s = compose(AccountantState(), 1.0, 1.0, 1);
  const EpsilonResult r = to_epsilon(s, 1e-5);
  CHECK(r.mechanism_ran);
  CHECK(r.best_order == 6);
  // min over integer alpha of alpha/2 + ln(1e5)/(alpha-1) = 3 + ln(1e5)/5.
  CHECK(r.epsilon == doctest::Approx(5.302585092994046).epsilon(1e-12));
}

TEST_CASE("to_epsilon monotonicities") {
  const AccountantState s = compose(AccountantState(), 0.05, 1.0, 100);
  CHECK(to_epsilon(s, 1e-6).epsilon > to_epsilon(s, 1e-4).epsilon);

  const AccountantState more = compose(s, 0.05, 1.0, 100);
  CHECK(to_epsilon(more, 1e-5).epsilon > to_epsilon(s, 1e-5).epsilon);
}

TEST_CASE("to_epsilon with an empty accountant flags the vacuous value") {
  const AccountantState s;
  const EpsilonResult r = to_epsilon(s, 1e-5);
  CHECK_FALSE(r.mechanism_ran);
  // min over alpha of ln(1e5)/(alpha-1), reached at the largest order.
  CHECK(r.best_order == 256);
  CHECK(r.epsilon == doctest::Approx(std::log(1e5) / 255.0));
  CHECK_THROWS_AS(to_epsilon(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(to_epsilon(s, 1.0), std::invalid_argument);
}

TEST_CASE("epsilon is monotone in steps, q, and sigma") {
  const double delta = 1e-5;
  auto eps = [&](double q, double sigma, std::int64_t steps) {
    return to_epsilon(compose(AccountantState(), q, sigma, steps), delta)
        .epsilon;
  };
  for (const double q : {0.01, 0.1, 0.5}) {
    CHECK(eps(q, 1.0, 200) >= eps(q, 1.0, 100));
    CHECK(eps(q, 0.5, 100) >= eps(q, 1.5, 100));
  }
  CHECK(eps(0.2, 1.0, 100) >= eps(0.1, 1.0, 100));
  CHECK(eps(0.1, 1.0, 100) >= eps(0.01, 1.0, 100));
}

TEST_CASE("calibration roundtrip over the experiment sweep") {
  for (const double target : {0.5, 5.0, 15.0, 20.0, 25.0}) {
    const CalibrationResult r =
        calibrate_sigma({target, 1e-5}, 0.05, 500);
    CHECK_FALSE(r.hit_floor);
    const double achieved =
        to_epsilon(compose(AccountantState(), 0.05, r.sigma, 500), 1e-5)
            .epsilon;
    CHECK(achieved == doctest::Approx(r.achieved_epsilon));
    CHECK(achieved <= target);
    CHECK(achieved >= 0.99 * target);
  }
}

TEST_CASE("tighter targets need more noise") {
  const CalibrationResult tight = calibrate_sigma({0.5, 1e-5}, 0.05, 500);
  const CalibrationResult loose = calibrate_sigma({25.0, 1e-5}, 0.05, 500);
  CHECK(tight.sigma > loose.sigma);
}

TEST_CASE("vanishing sample rate lands near the numerical floor") {
  // Subsampling at q = 1e-6 nearly suffices on its own: for moderate
  // targets the calibrated sigma stays within twice the search floor. Very
  // tight targets are the exception; the conversion then needs large
  // orders, where the binomial bound forces sigma upward, so only the
  // never-above-target half of the contract applies there.
  for (const double target : {5.0, 15.0, 20.0, 25.0}) {
    const CalibrationResult r = calibrate_sigma({target, 1e-5}, 1e-6, 500);
    CHECK(r.sigma <= 2.0 * kSigmaFloor);
    CHECK(r.achieved_epsilon <= target);
  }
  const CalibrationResult tight = calibrate_sigma({0.5, 1e-5}, 1e-6, 500);
  CHECK(tight.achieved_epsilon <= 0.5);
  CHECK(tight.achieved_epsilon >= 0.99 * 0.5);

  // A generous budget is already met at the floor itself.
  const CalibrationResult floor = calibrate_sigma({25.0, 1e-5}, 1e-6, 500);
  CHECK(floor.hit_floor);
  CHECK(floor.sigma == kSigmaFloor);
}

TEST_CASE("unreachable targets raise with a bracket") {
  // The RDP -> (eps, delta) conversion cannot go below
  // ln(1/delta)/(max_order - 1) > 0.045 for delta = 1e-5; ask for less.
  try {
    calibrate_sigma({1e-6, 1e-5}, 0.05, 500);
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    CHECK(e.bracket_lo() > 0.0);
    CHECK(e.bracket_hi() > e.bracket_lo());
  }
}

TEST_CASE("calibration validates inputs") {
  CHECK_THROWS_AS(calibrate_sigma({-1.0, 1e-5}, 0.05, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(calibrate_sigma({1.0, 0.0}, 0.05, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(calibrate_sigma({1.0, 1e-5}, 0.0, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(calibrate_sigma({1.0, 1e-5}, 0.05, 0),
                  std::invalid_argument);
}

TEST_CASE("default orders are 2..64 plus {128, 256}") {
  const auto orders = default_orders();
  REQUIRE(orders.size() == 65);
  CHECK(orders.front() == 2);
  CHECK(orders[62] == 64);
  CHECK(orders[63] == 128);
  CHECK(orders.back() == 256);
}
