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

#ifndef PRIVTEXT_FEDERATED_H_
#define PRIVTEXT_FEDERATED_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "privtext/accountant.h"
#include "privtext/corpus.h"
#include "privtext/model.h"
#include "privtext/train.h"

namespace privtext {

enum class Weighting { kByExampleCount, kUniform };

// DP configuration of the federated clients: noise is applied at gradient
// level inside each client's DP-SGD, not to the uploaded weights. The noise
// multiplier comes from calibration and must be set before running.
struct FederatedDp {
  double clip_norm = 1.0;
  std::optional<double> noise_multiplier;
  double delta = 1e-5;  // for per-client epsilon reporting
};

struct FederatedConfig {
  int num_clients = 10;
  double client_fraction = 0.5;  // in (0, 1]
  int rounds = 20;
  int local_epochs = 1;
  std::uint32_t local_lot_size = 32;
  double learning_rate = 0.1;
  std::optional<FederatedDp> dp;
  Weighting weighting = Weighting::kByExampleCount;
  std::uint64_t sampling_seed = 0;
  // Seed stream for local data shuffles and DP noise; deliberately separate
  // from sampling_seed so one randomness source can vary at a time.
  std::uint64_t train_seed = 0;
  // Evaluate the global model on the eval set after every round (for
  // stability studies), not just at the end.
  bool record_round_accuracy = false;
};

struct RoundRecord {
  int round_index = 0;
  std::vector<int> selected_clients;  // sorted ids
  std::uint64_t global_params_hash = 0;
  // Max local step count among this round's clients (the worst case that
  // drives the epsilon report).
  std::int64_t per_client_steps = 0;
  std::optional<double> accountant_epsilon_after;
};

struct ClientUpdate {
  int client_id = 0;
  ParamVector params;
  std::int64_t examples_used = 0;
};

struct FederatedResult {
  ParamVector params;
  std::vector<RoundRecord> rounds;
  double final_accuracy = 0.0;
  // Max per-client epsilon (worst case); present only for DP runs.
  std::optional<double> final_epsilon;
  // Filled when record_round_accuracy is set; one entry per round.
  std::vector<double> round_accuracies;
};

// ceil(client_fraction * N) distinct client ids, uniform without
// replacement, keyed by (sampling_seed, round_index); returned sorted.
std::vector<int> sample_clients(int round_index,
                                const FederatedConfig& config);

struct LocalTrainResult {
  ParamVector params;
  std::int64_t examples_used = 0;
  std::int64_t steps_taken = 0;
};

// One client's contribution for one round: copies the global parameters and
// runs local_epochs of (DP-)SGD over the partition. Lot size truncates to
// the partition size when the partition is smaller.
LocalTrainResult local_train(const ParamVector& global_params,
                             const std::vector<LabeledExample>& train,
                             const ClientPartition& partition,
                             const FederatedConfig& config,
                             const ModelConfig& model_config,
                             int round_index,
                             const LotObserver& observer = nullptr);

// FedAvg aggregation; summation runs in ascending client-id order
// regardless of the list order, so the result is permutation-invariant.
ParamVector aggregate(const std::vector<ClientUpdate>& updates,
                      Weighting weighting);

// The full FedAvg loop: sample -> local train -> aggregate -> record, then
// evaluate the final global model. With DP enabled every client feeds its
// own accountant at its local sample rate; the reported epsilon is the
// maximum over clients.
FederatedResult run_federated(const std::vector<LabeledExample>& train,
                              const std::vector<ClientPartition>& partitions,
                              const FederatedConfig& config,
                              const ModelConfig& model_config,
                              const std::vector<LabeledExample>& eval_set);

// Round-trace file: one RoundRecord per line as JSON.
std::string round_record_json(const RoundRecord& record);
void write_round_trace(const std::string& path,
                       const std::vector<RoundRecord>& records);

}  // namespace privtext

#endif  // PRIVTEXT_FEDERATED_H_
