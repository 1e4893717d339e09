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

#ifndef PRIVTEXT_HARNESS_H_
#define PRIVTEXT_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "privtext/corpus.h"
#include "privtext/federated.h"
#include "privtext/model.h"
#include "privtext/toml.h"

namespace privtext {

enum class Setup {
  kBaseline = 0,
  kCentralizedDp = 1,
  kDpFlIid = 2,
  kDpFlNoniid = 3,
  kFlIid = 4,
  kFlNoniid = 5,
};

const char* setup_name(Setup setup);
bool parse_setup(const std::string& s, Setup* out);
bool setup_uses_epsilon(Setup setup);
bool setup_is_federated(Setup setup);

struct CentralizedOptions {
  int epochs = 5;
  std::uint32_t lot_size = 32;
  double learning_rate = 0.1;
};

struct NonIidSpec {
  std::uint32_t shard_size = 240;
  int shards_per_client = 10;
};

// Full declarative description of one experiment grid:
// setups x epsilons x repeats, all seeded from master_seed.
struct ExperimentConfig {
  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::kPhrasebank;
  CorpusEncoding corpus_encoding = CorpusEncoding::kUtf8;
  FeaturizeOptions featurize;
  ModelConfig model;
  SplitSpec split;
  std::vector<Setup> setups;
  std::vector<double> epsilons;
  double delta = 1e-5;
  int repeats = 3;
  double clip_norm = 1.0;
  CentralizedOptions centralized;
  FederatedConfig federated;
  NonIidSpec noniid;
  std::uint64_t master_seed = 0;
  // By default the 3 repeats re-seed everything downstream of the split;
  // this flag additionally re-splits train/test per run.
  bool resplit_per_run = false;
};

struct RunResult {
  Setup setup = Setup::kBaseline;
  std::optional<double> epsilon;  // target; absent for non-DP setups
  int run_index = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string fail_reason;
  double accuracy = 0.0;
  std::optional<double> achieved_epsilon;
  // Measured, in-memory only; excluded from runs.jsonl so identical
  // configurations produce byte-identical artifacts.
  double wall_clock_s = 0.0;
};

struct CellSummary {
  Setup setup = Setup::kBaseline;
  std::optional<double> epsilon;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation (n-1)
  int n_runs = 0;
  // Fewer successful runs than attempts, or a single-run cell.
  bool flagged = false;
};

struct ExperimentOutput {
  std::vector<RunResult> runs;
  std::vector<CellSummary> cells;
};

// Child seed for one grid cell run, a pure function of
// (master_seed, setup tag, epsilon bits, run_index).
std::uint64_t derive_child_seed(std::uint64_t master_seed, Setup setup,
                                std::optional<double> epsilon,
                                int run_index);

// Executes the whole grid. Failed runs (calibration failure, divergence)
// are recorded with a reason and never abort the grid. Runs execute
// possibly in parallel (PRIVTEXT_THREADS caps workers, 0 = auto) with
// results merged by run key, so outputs are independent of scheduling.
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Mean and sample std per (setup, epsilon) cell over successful runs,
// ordered setup-major then epsilon ascending.
std::vector<CellSummary> summarize(const std::vector<RunResult>& results);

struct TrendReport {
  // Adjacent epsilon pairs whose mean accuracy drops by more than one std
  // of the higher-epsilon cell.
  int monotone_violations = 0;
  // Baseline mean minus the best cell mean of the checked setup.
  double baseline_gap = 0.0;
};

TrendReport trend_check(const std::vector<CellSummary>& summaries,
                        Setup setup);

// ---- artifacts ----

// One RunResult as a JSON object (single line, sorted keys).
std::string run_result_json(const RunResult& result);
RunResult parse_run_result_json(const std::string& line, int lineno);

void write_runs_jsonl(const std::string& path,
                      const std::vector<RunResult>& runs);
std::vector<RunResult> read_runs_jsonl(const std::string& path);

// Header: setup,epsilon,mean_accuracy,std_accuracy,n_runs. Accuracies are
// fractions in [0, 1], shortest round-trip formatting.
void write_summary_csv(const std::string& path,
                       const std::vector<CellSummary>& cells);

// Report grid on a stream: rows grouped by setup, one row per epsilon,
// accuracy cells rendered as "mean ± std" in percent with two decimals.
void render_table(std::ostream& out, const std::vector<CellSummary>& cells);
std::string format_cell(double mean_fraction, double std_fraction);

// ---- config ----

// Loads the TOML config, applies --set overrides (dotted paths; a bare key
// resolves by unique suffix), rejects unknown keys, and validates.
ExperimentConfig load_experiment_config(
    const std::string& path, const std::vector<std::string>& overrides = {});
ExperimentConfig config_from_document(
    const toml::Document& doc, const std::vector<std::string>& overrides = {});

// ---- invariants ----

// Post-run checks: every achieved epsilon within its target, plus a
// determinism self-check that re-executes one run and compares the
// serialized result byte for byte. Returns human-readable problems.
std::vector<std::string> verify_invariants(const ExperimentConfig& config,
                                           const ExperimentOutput& output);

}  // namespace privtext

#endif  // PRIVTEXT_HARNESS_H_
