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

#include "privtext/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <thread>
#include <tuple>

#include "privtext/accountant.h"
#include "privtext/errors.h"
#include "privtext/hash.h"
#include "privtext/train.h"

namespace privtext {

namespace {

struct RunSpec {
  Setup setup;
  std::optional<double> epsilon;
  int run_index;
};

struct PreparedData {
  std::vector<LabeledExample> all;  // featurized, pre-split
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
};

std::vector<Label> labels_of(const std::vector<LabeledExample>& examples) {
  std::vector<Label> labels;
  labels.reserve(examples.size());
  for (const LabeledExample& ex : examples) labels.push_back(ex.label);
  return labels;
}

std::vector<std::uint32_t> all_indices(std::size_t n) {
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  return idx;
}

// Worst-case noise multiplier across clients: calibrate per distinct
// (sample rate, max step count) pair assuming selection in every round.
double calibrate_federated_sigma(const ExperimentConfig& config,
                                 const std::vector<ClientPartition>& parts,
                                 double epsilon) {
  std::vector<std::pair<double, std::int64_t>> seen;
  double sigma = 0.0;
  for (const ClientPartition& part : parts) {
    const auto n = static_cast<std::int64_t>(part.size());
    if (n == 0) continue;
    const std::int64_t lot =
        std::min<std::int64_t>(config.federated.local_lot_size, n);
    const double q = static_cast<double>(lot) / static_cast<double>(n);
    const std::int64_t steps = static_cast<std::int64_t>(
                                   config.federated.rounds) *
                               config.federated.local_epochs * (n / lot);
    const std::pair<double, std::int64_t> key{q, steps};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    const CalibrationResult c =
        calibrate_sigma({epsilon, config.delta}, q, steps);
    sigma = std::max(sigma, c.sigma);
  }
  if (sigma == 0.0) throw std::invalid_argument("no non-empty partitions");
  return sigma;
}

RunResult run_one(const ExperimentConfig& config, const PreparedData& data,
                  const RunSpec& spec) {
  RunResult result;
  result.setup = spec.setup;
  result.epsilon = spec.epsilon;
  result.run_index = spec.run_index;
  result.seed = derive_child_seed(config.master_seed, spec.setup,
                                  spec.epsilon, spec.run_index);
  const auto started = std::chrono::steady_clock::now();

  try {
    const std::vector<LabeledExample>* train = &data.train;
    const std::vector<LabeledExample>* test = &data.test;
    std::vector<LabeledExample> run_train, run_test;
    if (config.resplit_per_run) {
      SplitSpec split = config.split;
      split.seed = derive_seed(result.seed, "resplit");
      std::tie(run_train, run_test) = train_test_split(data.all, split);
      train = &run_train;
      test = &run_test;
    }

    ModelConfig model = config.model;
    model.init_seed = derive_seed(result.seed, "init", model.init_seed);

    if (spec.setup == Setup::kBaseline ||
        spec.setup == Setup::kCentralizedDp) {
      SgdOptions opts;
      opts.epochs = config.centralized.epochs;
      opts.lot_size = config.centralized.lot_size;
      opts.learning_rate = config.centralized.learning_rate;
      opts.seed = derive_seed(result.seed, "centralized");

      if (spec.setup == Setup::kCentralizedDp) {
        const auto n = static_cast<std::int64_t>(train->size());
        const std::int64_t lot =
            std::min<std::int64_t>(config.centralized.lot_size, n);
        const double q = static_cast<double>(lot) / static_cast<double>(n);
        const std::int64_t steps =
            static_cast<std::int64_t>(config.centralized.epochs) * (n / lot);
        const CalibrationResult calib =
            calibrate_sigma({*spec.epsilon, config.delta}, q, steps);

        DpSgdParams dp;
        dp.clip_norm = config.clip_norm;
        dp.noise_multiplier = calib.sigma;
        dp.sample_rate = q;
        opts.dp = dp;

        const SgdResult sgd = run_sgd(init_params(model), *train,
                                      all_indices(train->size()), model,
                                      opts);
        result.achieved_epsilon =
            to_epsilon(compose(AccountantState(), q, calib.sigma, sgd.steps),
                       config.delta)
                .epsilon;
        result.accuracy = evaluate(sgd.params, *test, model);
      } else {
        const SgdResult sgd = run_sgd(init_params(model), *train,
                                      all_indices(train->size()), model,
                                      opts);
        result.accuracy = evaluate(sgd.params, *test, model);
      }
    } else {
      const bool noniid = spec.setup == Setup::kDpFlNoniid ||
                          spec.setup == Setup::kFlNoniid;
      const bool with_dp = setup_uses_epsilon(spec.setup);
      const std::vector<Label> labels = labels_of(*train);

      std::vector<ClientPartition> parts;
      if (noniid) {
        parts = partition_noniid_shards(
            labels, config.noniid.shard_size, config.noniid.shards_per_client,
            config.federated.num_clients, derive_seed(result.seed, "part"));
      } else {
        parts = partition_iid(static_cast<std::uint32_t>(train->size()),
                              config.federated.num_clients,
                              derive_seed(result.seed, "part"), labels);
      }

      FederatedConfig fed = config.federated;
      fed.sampling_seed = derive_seed(result.seed, "sampling",
                                      config.federated.sampling_seed);
      fed.train_seed = derive_seed(result.seed, "fedtrain");
      if (with_dp) {
        FederatedDp dp;
        dp.clip_norm = config.clip_norm;
        dp.delta = config.delta;
        dp.noise_multiplier =
            calibrate_federated_sigma(config, parts, *spec.epsilon);
        fed.dp = dp;
      } else {
        fed.dp.reset();
      }

      const FederatedResult fr =
          run_federated(*train, parts, fed, model, *test);
      result.accuracy = fr.final_accuracy;
      result.achieved_epsilon = fr.final_epsilon;
    }
  } catch (const std::exception& e) {
    result.ok = false;
    result.fail_reason = e.what();
    result.accuracy = 0.0;
    result.achieved_epsilon.reset();
  }

  result.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    started)
          .count();
  return result;
}

int worker_count(std::size_t n_runs) {
  unsigned threads = 0;
  if (const char* env = std::getenv("PRIVTEXT_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') {
      throw ConfigError("PRIVTEXT_THREADS must be a non-negative integer");
    }
    threads = static_cast<unsigned>(v);
  }
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  return static_cast<int>(
      std::min<std::size_t>(threads, std::max<std::size_t>(n_runs, 1)));
}

std::vector<RunSpec> build_grid(const ExperimentConfig& config) {
  std::vector<RunSpec> grid;
  for (Setup setup : config.setups) {
    if (setup_uses_epsilon(setup)) {
      for (double eps : config.epsilons) {
        for (int r = 0; r < config.repeats; ++r) {
          grid.push_back({setup, eps, r});
        }
      }
    } else {
      for (int r = 0; r < config.repeats; ++r) {
        grid.push_back({setup, std::nullopt, r});
      }
    }
  }
  return grid;
}

PreparedData prepare_data(const ExperimentConfig& config) {
  PreparedData data;
  const std::vector<LabeledExample> raw = load_corpus(
      config.corpus_path, config.corpus_format, config.corpus_encoding);
  data.all = featurize(raw, config.featurize).examples;
  std::tie(data.train, data.test) = train_test_split(data.all, config.split);
  return data;
}

}  // namespace

const char* setup_name(Setup setup) {
  switch (setup) {
    case Setup::kBaseline: return "baseline";
    case Setup::kCentralizedDp: return "centralized_dp";
    case Setup::kDpFlIid: return "dp_fl_iid";
    case Setup::kDpFlNoniid: return "dp_fl_noniid";
    case Setup::kFlIid: return "fl_iid";
    case Setup::kFlNoniid: return "fl_noniid";
  }
  return "?";
}

bool parse_setup(const std::string& s, Setup* out) {
  for (Setup setup : {Setup::kBaseline, Setup::kCentralizedDp,
                      Setup::kDpFlIid, Setup::kDpFlNoniid, Setup::kFlIid,
                      Setup::kFlNoniid}) {
    if (s == setup_name(setup)) {
      *out = setup;
      return true;
    }
  }
  return false;
}

bool setup_uses_epsilon(Setup setup) {
  return setup == Setup::kCentralizedDp || setup == Setup::kDpFlIid ||
         setup == Setup::kDpFlNoniid;
}

bool setup_is_federated(Setup setup) {
  return setup == Setup::kDpFlIid || setup == Setup::kDpFlNoniid ||
         setup == Setup::kFlIid || setup == Setup::kFlNoniid;
}

std::uint64_t derive_child_seed(std::uint64_t master_seed, Setup setup,
                                std::optional<double> epsilon,
                                int run_index) {
  std::uint64_t eps_bits = 0;
  if (epsilon.has_value()) {
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&eps_bits, &*epsilon, sizeof(eps_bits));
  }
  std::uint64_t h = fnv1a64(setup_name(setup), master_seed);
  h = fnv1a64_u64(h, eps_bits);
  h = fnv1a64_u64(h, static_cast<std::uint64_t>(run_index));
  return h;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  const PreparedData data = prepare_data(config);
  const std::vector<RunSpec> grid = build_grid(config);

  ExperimentOutput output;
  output.runs.resize(grid.size());
  const int workers = worker_count(grid.size());

  if (workers <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      output.runs[i] = run_one(config, data, grid[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= grid.size()) return;
          output.runs[i] = run_one(config, data, grid[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  output.cells = summarize(output.runs);
  return output;
}

std::vector<CellSummary> summarize(const std::vector<RunResult>& results) {
  struct Key {
    int setup;
    bool has_eps;
    double eps;
    bool operator<(const Key& o) const {
      if (setup != o.setup) return setup < o.setup;
      if (has_eps != o.has_eps) return !has_eps;  // baseline first
      return eps < o.eps;
    }
  };
  struct Cell {
    std::vector<double> accs;
    int attempts = 0;
  };

  std::map<Key, Cell> cells;
  for (const RunResult& r : results) {
    const Key key{static_cast<int>(r.setup), r.epsilon.has_value(),
                  r.epsilon.value_or(0.0)};
    Cell& cell = cells[key];
    ++cell.attempts;
    if (r.ok) cell.accs.push_back(r.accuracy);
  }

  std::vector<CellSummary> out;
  out.reserve(cells.size());
  for (const auto& [key, cell] : cells) {
    CellSummary s;
    s.setup = static_cast<Setup>(key.setup);
    if (key.has_eps) s.epsilon = key.eps;
    s.n_runs = static_cast<int>(cell.accs.size());
    if (!cell.accs.empty()) {
      double sum = 0.0;
      for (double a : cell.accs) sum += a;
      s.mean_accuracy = sum / static_cast<double>(cell.accs.size());
      if (cell.accs.size() > 1) {
        double ss = 0.0;
        for (double a : cell.accs) {
          ss += (a - s.mean_accuracy) * (a - s.mean_accuracy);
        }
        s.std_accuracy =
            std::sqrt(ss / static_cast<double>(cell.accs.size() - 1));
      }
    }
    s.flagged = s.n_runs < cell.attempts || s.n_runs <= 1;
    out.push_back(s);
  }
  return out;
}

TrendReport trend_check(const std::vector<CellSummary>& summaries,
                        Setup setup) {
  std::vector<CellSummary> cells;
  const CellSummary* baseline = nullptr;
  for (const CellSummary& s : summaries) {
    if (s.setup == setup && s.epsilon.has_value()) cells.push_back(s);
    if (s.setup == Setup::kBaseline && !s.epsilon.has_value()) {
      baseline = &s;
    }
  }
  if (baseline == nullptr) {
    throw std::invalid_argument("trend check requires a baseline cell");
  }
  if (cells.size() < 3) {
    throw std::invalid_argument(
        "trend check requires the setup at >= 3 epsilon values");
  }
  std::sort(cells.begin(), cells.end(),
            [](const CellSummary& a, const CellSummary& b) {
              return *a.epsilon < *b.epsilon;
            });

  TrendReport report;
  double best = cells.front().mean_accuracy;
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    const double drop =
        cells[i].mean_accuracy - cells[i + 1].mean_accuracy;
    if (drop > cells[i + 1].std_accuracy) ++report.monotone_violations;
    best = std::max(best, cells[i + 1].mean_accuracy);
  }
  report.baseline_gap = baseline->mean_accuracy - best;
  return report;
}

std::vector<std::string> verify_invariants(const ExperimentConfig& config,
                                           const ExperimentOutput& output) {
  std::vector<std::string> problems;
  for (const RunResult& r : output.runs) {
    if (!r.ok || !r.epsilon.has_value()) continue;
    if (!r.achieved_epsilon.has_value()) {
      problems.push_back(std::string("DP run missing achieved epsilon: ") +
                         setup_name(r.setup));
      continue;
    }
    if (*r.achieved_epsilon > *r.epsilon) {
      problems.push_back(
          "achieved epsilon " + std::to_string(*r.achieved_epsilon) +
          " exceeds target " + std::to_string(*r.epsilon) + " for " +
          setup_name(r.setup) + " run " + std::to_string(r.run_index));
    }
  }

  // Determinism self-check: re-execute the first successful run and compare
  // the serialized record byte for byte.
  const PreparedData data = prepare_data(config);
  for (const RunResult& r : output.runs) {
    if (!r.ok) continue;
    const RunSpec spec{r.setup, r.epsilon, r.run_index};
    const RunResult again = run_one(config, data, spec);
    if (run_result_json(again) != run_result_json(r)) {
      problems.push_back(std::string("determinism self-check failed for ") +
                         setup_name(r.setup) + " run " +
                         std::to_string(r.run_index));
    }
    break;
  }
  return problems;
}

}  // namespace privtext
