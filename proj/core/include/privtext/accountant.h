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

#ifndef PRIVTEXT_ACCOUNTANT_H_
#define PRIVTEXT_ACCOUNTANT_H_

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace privtext {

// Target (epsilon, delta) guarantee for the end-to-end training mechanism.
struct PrivacyBudget {
  double epsilon = 1.0;  // > 0
  double delta = 1e-5;   // in (0, 1)
};

void validate_budget(const PrivacyBudget& budget);

// Renyi orders used for accounting: integers 2..64 plus {128, 256}.
std::vector<int> default_orders();

// Renyi divergence bound of one subsampled Gaussian step at integer order
// alpha >= 2:
//   (1/(alpha-1)) * ln( sum_{k=0..alpha} C(alpha,k) (1-q)^(alpha-k) q^k
//                       * exp(k(k-1) / (2 sigma^2)) )
// evaluated with log-sum-exp. q = 0 costs nothing; q = 1 reduces to the
// plain Gaussian mechanism alpha / (2 sigma^2). Tiny negative round-off is
// clamped to zero.
double rdp_subsampled_gaussian(double q, double sigma, int alpha);

// Accumulated RDP over a sequence of mechanism steps. Internally the state
// keeps (q, sigma) -> step-count segments with integer step counts, so
// composition is exactly linear: composing a then b steps equals composing
// a+b in one call, bit for bit.
class AccountantState {
 public:
  AccountantState() : AccountantState(default_orders()) {}
  explicit AccountantState(std::vector<int> orders);

  const std::vector<int>& orders() const { return orders_; }
  std::vector<double> rdp_totals() const;
  std::int64_t steps_recorded() const { return steps_recorded_; }

  void add_steps(double q, double sigma, std::int64_t steps);

 private:
  struct Segment {
    double q;
    double sigma;
    std::int64_t steps;
  };

  std::vector<int> orders_;
  std::vector<Segment> segments_;
  std::int64_t steps_recorded_ = 0;
};

// Functional composition: rdp_totals[alpha] += steps * rdp(q, sigma, alpha).
AccountantState compose(AccountantState state, double q, double sigma,
                        std::int64_t steps);

struct EpsilonResult {
  double epsilon = 0.0;
  int best_order = 0;
  // False when no mechanism steps were recorded; epsilon then reports the
  // vacuous conversion min_alpha ln(1/delta)/(alpha-1).
  bool mechanism_ran = false;
};

// RDP -> (epsilon, delta): epsilon = min over orders alpha of
// rdp_total(alpha) + ln(1/delta) / (alpha - 1), with the minimizing order.
EpsilonResult to_epsilon(const AccountantState& state, double delta);

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

struct CalibrationResult {
  double sigma = 0.0;
  double achieved_epsilon = 0.0;
  int best_order = 0;
  // Subsampling alone already beat the target at the accountant's numerical
  // floor sigma; achieved_epsilon is then below 0.99 * target.
  bool hit_floor = false;
};

// Smallest noise multiplier whose end-to-end epsilon lands in
// [0.99 * target, target]; never above the target. Bisection over sigma with
// the upper bracket doubled until it crosses the target; fails after 200
// iterations with the bracketing interval.
CalibrationResult calibrate_sigma(const PrivacyBudget& target, double q,
                                  std::int64_t steps,
                                  const std::vector<int>& orders =
                                      default_orders());

// Floor of the sigma search; also the lower edge of the accountant's
// overflow-safe domain.
inline constexpr double kSigmaFloor = 0.3;

}  // namespace privtext

#endif  // PRIVTEXT_ACCOUNTANT_H_
