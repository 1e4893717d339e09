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

#include "privtext/federated.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "privtext/errors.h"
#include "privtext/hash.h"
#include "privtext/rng.h"

namespace privtext {

namespace {

int selected_count(const FederatedConfig& config) {
  return static_cast<int>(
      std::ceil(config.client_fraction * config.num_clients));
}

void validate_federated_config(const FederatedConfig& config) {
  if (config.num_clients < 1) {
    throw std::invalid_argument("num_clients must be >= 1");
  }
  if (!(config.client_fraction > 0.0) || config.client_fraction > 1.0) {
    throw std::invalid_argument("client_fraction must lie in (0, 1]");
  }
  if (config.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (config.local_epochs < 1) {
    throw std::invalid_argument("local_epochs must be >= 1");
  }
  if (config.local_lot_size < 1) {
    throw std::invalid_argument("local_lot_size must be >= 1");
  }
  if (selected_count(config) < 1) {
    throw std::invalid_argument("client fraction selects no clients");
  }
}

}  // namespace

std::vector<int> sample_clients(int round_index,
                                const FederatedConfig& config) {
  validate_federated_config(config);
  const int k = std::min(selected_count(config), config.num_clients);
  auto picked = sample_without_replacement(
      static_cast<std::uint64_t>(config.num_clients),
      static_cast<std::uint64_t>(k),
      derive_seed(config.sampling_seed, "client-sample",
                  static_cast<std::uint64_t>(round_index)));
  std::vector<int> ids(picked.begin(), picked.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

LocalTrainResult local_train(const ParamVector& global_params,
                             const std::vector<LabeledExample>& train,
                             const ClientPartition& partition,
                             const FederatedConfig& config,
                             const ModelConfig& model_config,
                             int round_index, const LotObserver& observer) {
  if (partition.example_indices.empty()) {
    throw std::invalid_argument("empty client partition");
  }

  SgdOptions opts;
  opts.epochs = config.local_epochs;
  opts.lot_size = config.local_lot_size;
  opts.learning_rate = config.learning_rate;
  opts.seed = derive_seed(config.train_seed, "local",
                          static_cast<std::uint64_t>(partition.client_id),
                          static_cast<std::uint64_t>(round_index));
  if (config.dp.has_value()) {
    if (!config.dp->noise_multiplier.has_value()) {
      throw std::invalid_argument(
          "DP is enabled but no noise multiplier was calibrated");
    }
    DpSgdParams p;
    p.clip_norm = config.dp->clip_norm;
    p.noise_multiplier = *config.dp->noise_multiplier;
    const double n = static_cast<double>(partition.size());
    p.sample_rate = std::min(
        1.0, static_cast<double>(config.local_lot_size) / n);
    opts.dp = p;
  }

  const SgdResult r = run_sgd(global_params, train,
                              partition.example_indices, model_config, opts,
                              observer);
  return {r.params, r.examples_used, r.steps};
}

ParamVector aggregate(const std::vector<ClientUpdate>& updates,
                      Weighting weighting) {
  if (updates.empty()) throw std::invalid_argument("no updates to aggregate");
  const std::size_t dim = updates.front().params.size();

  std::vector<std::size_t> order(updates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return updates[a].client_id < updates[b].client_id;
  });

  double total_weight = 0.0;
  for (const ClientUpdate& u : updates) {
    if (u.params.size() != dim) {
      throw std::invalid_argument("update length mismatch");
    }
    total_weight += weighting == Weighting::kByExampleCount
                        ? static_cast<double>(u.examples_used)
                        : 1.0;
  }
  if (!(total_weight > 0.0)) {
    throw std::invalid_argument("total aggregation weight is zero");
  }

  ParamVector out;
  out.values.assign(dim, 0.0);
  for (std::size_t pos : order) {
    const ClientUpdate& u = updates[pos];
    const double w = (weighting == Weighting::kByExampleCount
                          ? static_cast<double>(u.examples_used)
                          : 1.0) /
                     total_weight;
    for (std::size_t i = 0; i < dim; ++i) {
      out.values[i] += w * u.params[i];
    }
  }
  return out;
}

FederatedResult run_federated(const std::vector<LabeledExample>& train,
                              const std::vector<ClientPartition>& partitions,
                              const FederatedConfig& config,
                              const ModelConfig& model_config,
                              const std::vector<LabeledExample>& eval_set) {
  validate_federated_config(config);
  if (partitions.size() != static_cast<std::size_t>(config.num_clients)) {
    throw std::invalid_argument(
        "partition count does not match num_clients");
  }
  for (const ClientPartition& p : partitions) {
    for (std::uint32_t idx : p.example_indices) {
      if (idx >= train.size()) {
        throw std::invalid_argument("partition index outside train set");
      }
    }
  }

  const bool dp = config.dp.has_value();
  std::vector<AccountantState> accountants;
  if (dp) {
    if (!config.dp->noise_multiplier.has_value()) {
      throw std::invalid_argument(
          "DP is enabled but no noise multiplier was calibrated");
    }
    accountants.assign(config.num_clients, AccountantState());
  }

  FederatedResult result;
  result.params = init_params(model_config);
  result.rounds.reserve(config.rounds);

  for (int round = 0; round < config.rounds; ++round) {
    const std::vector<int> selected = sample_clients(round, config);

    std::vector<ClientUpdate> updates;
    updates.reserve(selected.size());
    std::int64_t max_steps = 0;
    for (int client : selected) {
      const ClientPartition& part = partitions[client];
      LocalTrainResult local = local_train(result.params, train, part,
                                           config, model_config, round);
      max_steps = std::max(max_steps, local.steps_taken);
      if (dp) {
        const double n = static_cast<double>(part.size());
        const double q = std::min(
            1.0, static_cast<double>(config.local_lot_size) / n);
        accountants[client].add_steps(q, *config.dp->noise_multiplier,
                                      local.steps_taken);
      }
      updates.push_back(
          {client, std::move(local.params), local.examples_used});
    }

    result.params = aggregate(updates, config.weighting);

    RoundRecord record;
    record.round_index = round;
    record.selected_clients = selected;
    record.global_params_hash =
        digest_doubles(result.params.data(), result.params.size());
    record.per_client_steps = max_steps;
    if (dp) {
      double worst = 0.0;
      for (const AccountantState& acct : accountants) {
        worst = std::max(worst,
                         to_epsilon(acct, config.dp->delta).epsilon);
      }
      record.accountant_epsilon_after = worst;
    }
    result.rounds.push_back(std::move(record));
    if (config.record_round_accuracy) {
      result.round_accuracies.push_back(
          evaluate(result.params, eval_set, model_config));
    }
  }

  result.final_accuracy = evaluate(result.params, eval_set, model_config);
  if (dp && !result.rounds.empty()) {
    result.final_epsilon = result.rounds.back().accountant_epsilon_after;
  }
  return result;
}

std::string round_record_json(const RoundRecord& record) {
  nlohmann::json j;
  j["round_index"] = record.round_index;
  j["selected_clients"] = record.selected_clients;
  j["global_params_hash"] = record.global_params_hash;
  j["per_client_steps"] = record.per_client_steps;
  if (record.accountant_epsilon_after.has_value()) {
    j["accountant_epsilon_after"] = *record.accountant_epsilon_after;
  }
  return j.dump();
}

void write_round_trace(const std::string& path,
                       const std::vector<RoundRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open round trace for writing: " + path);
  for (const RoundRecord& r : records) out << round_record_json(r) << '\n';
  if (!out) throw IoError("round trace write failure: " + path);
}

}  // namespace privtext
