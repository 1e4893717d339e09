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

#include "privtext/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace privtext {

namespace {

double log_sum_exp(const std::vector<double>& logs) {
  const double m = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - m);
  return m + std::log(s);
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

}  // namespace

void validate_budget(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (!(budget.delta > 0.0) || !(budget.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
}

std::vector<int> default_orders() {
  std::vector<int> orders;
  orders.reserve(65);
  for (int a = 2; a <= 64; ++a) orders.push_back(a);
  orders.push_back(128);
  orders.push_back(256);
  return orders;
}

double rdp_subsampled_gaussian(double q, double sigma, int alpha) {
  if (alpha < 2) throw std::invalid_argument("alpha must be >= 2");
  if (q < 0.0 || q > 1.0) {
    throw std::invalid_argument("sample rate must lie in [0, 1]");
  }
  if (q == 0.0) return 0.0;
  if (!(sigma > 0.0)) {
    throw std::invalid_argument(
        "sigma must be positive when any data is sampled");
  }
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  if (q == 1.0) return alpha * inv_two_sigma_sq;

  std::vector<double> logs;
  logs.reserve(alpha + 1);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  for (int k = 0; k <= alpha; ++k) {
    double l = log_binomial(alpha, k) + (alpha - k) * log_1mq +
               k * (k - 1.0) * inv_two_sigma_sq;
    if (k > 0) l += k * log_q;
    logs.push_back(l);
  }
  double out = log_sum_exp(logs) / (alpha - 1.0);
  // The expansion can dip just below zero in floating point.
  if (out < 0.0 && out > -1e-15) out = 0.0;
  return out;
}

AccountantState::AccountantState(std::vector<int> orders)
    : orders_(std::move(orders)) {
  if (orders_.empty()) throw std::invalid_argument("no RDP orders");
  for (int a : orders_) {
    if (a < 2) throw std::invalid_argument("RDP orders must be >= 2");
  }
}

void AccountantState::add_steps(double q, double sigma, std::int64_t steps) {
  if (steps < 0) throw std::invalid_argument("negative step count");
  if (steps == 0) return;
  // Probe one order so invalid (q, sigma) pairs fail at composition time.
  rdp_subsampled_gaussian(q, sigma, orders_.front());
  for (Segment& s : segments_) {
    if (s.q == q && s.sigma == sigma) {
      s.steps += steps;
      steps_recorded_ += steps;
      return;
    }
  }
  segments_.push_back({q, sigma, steps});
  steps_recorded_ += steps;
}

std::vector<double> AccountantState::rdp_totals() const {
  std::vector<double> totals(orders_.size(), 0.0);
  for (const Segment& s : segments_) {
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      totals[i] += static_cast<double>(s.steps) *
                   rdp_subsampled_gaussian(s.q, s.sigma, orders_[i]);
    }
  }
  return totals;
}

AccountantState compose(AccountantState state, double q, double sigma,
                        std::int64_t steps) {
  state.add_steps(q, sigma, steps);
  return state;
}

EpsilonResult to_epsilon(const AccountantState& state, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const std::vector<double> totals = state.rdp_totals();
  const double log_inv_delta = std::log(1.0 / delta);

  EpsilonResult result;
  result.mechanism_ran = state.steps_recorded() > 0;
  result.epsilon = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < totals.size(); ++i) {
    const int alpha = state.orders()[i];
    const double eps = totals[i] + log_inv_delta / (alpha - 1.0);
    if (eps < result.epsilon) {
      result.epsilon = eps;
      result.best_order = alpha;
    }
  }
  return result;
}

CalibrationResult calibrate_sigma(const PrivacyBudget& target, double q,
                                  std::int64_t steps,
                                  const std::vector<int>& orders) {
  validate_budget(target);
  if (!(q > 0.0) || q > 1.0) {
    throw std::invalid_argument("sample rate must lie in (0, 1]");
  }
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");

  const auto eps_at = [&](double sigma) {
    return to_epsilon(compose(AccountantState(orders), q, sigma, steps),
                      target.delta);
  };

  EpsilonResult at_floor = eps_at(kSigmaFloor);
  if (at_floor.epsilon <= target.epsilon) {
    // Subsampling alone nearly suffices; the search floor is the answer.
    return {kSigmaFloor, at_floor.epsilon, at_floor.best_order, true};
  }

  int iterations = 0;
  double lo = kSigmaFloor;           // epsilon(lo) > target
  double hi = std::max(1.0, 2.0 * kSigmaFloor);
  while (eps_at(hi).epsilon > target.epsilon) {
    lo = hi;
    hi *= 2.0;
    if (++iterations > 200) {
      throw CalibrationError(
          "target epsilon unreachable while expanding sigma", lo, hi);
    }
  }

  while (true) {
    const EpsilonResult at_hi = eps_at(hi);
    if (at_hi.epsilon >= 0.99 * target.epsilon) {
      return {hi, at_hi.epsilon, at_hi.best_order, false};
    }
    const double mid = 0.5 * (lo + hi);
    if (eps_at(mid).epsilon > target.epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (++iterations > 200) {
      throw CalibrationError(
          "bisection failed to land within 1% below the target", lo, hi);
    }
  }
}

}  // namespace privtext
