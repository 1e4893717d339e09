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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "privtext/accountant.h"
#include "privtext/errors.h"
#include "privtext/harness.h"
#include "privtext/hash.h"
#include "privtext/synth.h"

namespace {

namespace fs = std::filesystem;
using namespace privtext;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct GenCorpusArgs {
  std::string out;
  std::size_t size = 3000;
  std::uint64_t seed = 0;
  std::string format = "phrasebank";
  int neutral_pct = 60;
  int positive_pct = 28;
  int negative_pct = 12;
};

int cmd_gen_corpus(const GenCorpusArgs& args) {
  try {
    SyntheticSpec spec;
    spec.size = args.size;
    spec.seed = args.seed;
    spec.mix_percent = {args.negative_pct, args.neutral_pct,
                        args.positive_pct};
    const CorpusFormat format = args.format == "tsv"
                                    ? CorpusFormat::kTsv
                                    : CorpusFormat::kPhrasebank;
    write_synthetic_corpus(args.out, spec, format);
    std::cout << "wrote " << args.size << " examples to " << args.out
              << "\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

struct CalibrateArgs {
  double epsilon = 1.0;
  double delta = 1e-5;
  double q = 0.01;
  std::int64_t steps = 1;
  std::string trace_path;
};

int cmd_calibrate(const CalibrateArgs& args) {
  try {
    const CalibrationResult result =
        calibrate_sigma({args.epsilon, args.delta}, args.q, args.steps);

    nlohmann::json j;
    j["sigma"] = result.sigma;
    j["achieved_epsilon"] = result.achieved_epsilon;
    j["best_order"] = result.best_order;
    j["hit_floor"] = result.hit_floor;
    std::cout << j.dump() << "\n";

    if (!args.trace_path.empty()) {
      std::ofstream trace(args.trace_path, std::ios::binary);
      if (!trace) throw IoError("cannot open trace file");
      AccountantState state;
      const std::vector<double> per_step =
          compose(state, args.q, result.sigma, 1).rdp_totals();
      for (std::int64_t step = 1; step <= args.steps; ++step) {
        nlohmann::json line;
        line["step"] = step;
        std::vector<double> totals(per_step.size());
        for (std::size_t i = 0; i < per_step.size(); ++i) {
          totals[i] = static_cast<double>(step) * per_step[i];
        }
        line["totals"] = totals;
        trace << line.dump() << "\n";
      }
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CalibrationError& e) {
    std::cerr << "error: " << e.what() << " (bracket [" << e.bracket_lo()
              << ", " << e.bracket_hi() << "])\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

struct RunArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& args) {
  ExperimentConfig config;
  try {
    std::vector<std::string> overrides = args.overrides;
    if (args.seed.has_value()) {
      overrides.push_back("experiment.master_seed=" +
                          std::to_string(*args.seed));
    }
    config = load_experiment_config(args.config_path, overrides);
    // Fail fast on an unreadable corpus; it is a configuration problem.
    std::ifstream probe(config.corpus_path);
    if (!probe) {
      throw ConfigError("corpus.path is not readable: " +
                        config.corpus_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    fs::create_directories(args.out_dir);
    const ExperimentOutput output = run_experiment(config);

    write_runs_jsonl((fs::path(args.out_dir) / "runs.jsonl").string(),
                     output.runs);
    write_summary_csv((fs::path(args.out_dir) / "summary.csv").string(),
                      output.cells);
    render_table(std::cout, output.cells);

    double total_s = 0.0;
    int failed = 0;
    for (const RunResult& r : output.runs) {
      total_s += r.wall_clock_s;
      if (!r.ok) ++failed;
    }
    std::cerr << output.runs.size() << " runs in " << total_s << " s";
    if (failed > 0) std::cerr << " (" << failed << " failed)";
    std::cerr << "\n";

    const std::vector<std::string> problems =
        verify_invariants(config, output);
    if (!problems.empty()) {
      for (const std::string& p : problems) {
        std::cerr << "invariant violation: " << p << "\n";
      }
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

struct ReportArgs {
  std::string runs_path;
};

int cmd_report(const ReportArgs& args) {
  try {
    const std::vector<RunResult> runs = read_runs_jsonl(args.runs_path);
    if (runs.empty()) {
      std::cerr << "error: no run records in " << args.runs_path << "\n";
      return kExitRuntime;
    }
    render_table(std::cout, summarize(runs));
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

struct InspectArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string partition = "iid";
};

int cmd_inspect_partition(const InspectArgs& args) {
  ExperimentConfig config;
  try {
    config = load_experiment_config(args.config_path, args.overrides);
    if (args.partition != "iid" && args.partition != "noniid") {
      throw ConfigError("--partition must be \"iid\" or \"noniid\"");
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const auto raw = load_corpus(config.corpus_path, config.corpus_format,
                                 config.corpus_encoding);
    const auto featurized = featurize(raw, config.featurize);
    auto [train, test] = train_test_split(featurized.examples, config.split);

    std::vector<Label> labels;
    labels.reserve(train.size());
    for (const auto& ex : train) labels.push_back(ex.label);

    const std::uint64_t seed =
        derive_seed(config.master_seed, "inspect-partition");
    std::vector<ClientPartition> parts;
    if (args.partition == "noniid") {
      parts = partition_noniid_shards(labels, config.noniid.shard_size,
                                      config.noniid.shards_per_client,
                                      config.federated.num_clients, seed);
    } else {
      parts = partition_iid(static_cast<std::uint32_t>(train.size()),
                            config.federated.num_clients, seed, labels);
    }

    std::cout << "client  size  negative  neutral  positive\n";
    for (const ClientPartition& p : parts) {
      char line[128];
      std::snprintf(line, sizeof(line), "%-7d %-5zu %-9lld %-8lld %lld\n",
                    p.client_id, p.size(),
                    static_cast<long long>(p.label_histogram[0]),
                    static_cast<long long>(p.label_histogram[1]),
                    static_cast<long long>(p.label_histogram[2]));
      std::cout << line;
    }
    std::cout << "heterogeneity (mean TV distance from global): "
              << partition_heterogeneity(parts) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "privtext: differentially private and federated text-classification "
      "simulator"};
  app.require_subcommand(1);

  GenCorpusArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "gen-corpus", "Generate a synthetic sentiment corpus");
  gen->add_option("--out", gen_args.out, "Output corpus file")->required();
  gen->add_option("--size", gen_args.size, "Number of sentences");
  gen->add_option("--seed", gen_args.seed, "Generator seed");
  gen->add_option("--format", gen_args.format, "Output format")
      ->check(CLI::IsMember({"phrasebank", "tsv"}));
  gen->add_option("--neutral-pct", gen_args.neutral_pct,
                  "Neutral class percentage");
  gen->add_option("--positive-pct", gen_args.positive_pct,
                  "Positive class percentage");
  gen->add_option("--negative-pct", gen_args.negative_pct,
                  "Negative class percentage");

  CalibrateArgs cal_args;
  CLI::App* cal = app.add_subcommand(
      "calibrate", "Calibrate the DP-SGD noise multiplier for a target "
                   "privacy budget");
  cal->add_option("--epsilon", cal_args.epsilon, "Target epsilon")
      ->required();
  cal->add_option("--delta", cal_args.delta, "Target delta");
  cal->add_option("--q", cal_args.q, "Per-step sample rate")->required();
  cal->add_option("--steps", cal_args.steps, "Total mechanism steps")
      ->required();
  cal->add_option("--trace", cal_args.trace_path,
                  "Write a per-step accountant trace (JSON lines)");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand(
      "run", "Run the experiment grid described by a config file");
  run->add_option("--config", run_args.config_path, "Experiment config")
      ->required();
  run->add_option("--out", run_args.out_dir,
                  "Output directory for runs.jsonl and summary.csv");
  run->add_option("--set", run_args.overrides,
                  "Override a config key (KEY=VALUE, repeatable)");
  std::uint64_t seed_flag = 0;
  CLI::Option* seed_opt =
      run->add_option("--seed", seed_flag, "Override the master seed");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand(
      "report", "Render the summary table from a runs.jsonl file");
  report->add_option("--runs", report_args.runs_path, "runs.jsonl path")
      ->required();

  InspectArgs inspect_args;
  CLI::App* inspect = app.add_subcommand(
      "inspect-partition", "Show per-client label histograms");
  inspect->add_option("--config", inspect_args.config_path,
                      "Experiment config")
      ->required();
  inspect->add_option("--set", inspect_args.overrides,
                      "Override a config key (KEY=VALUE, repeatable)");
  inspect->add_option("--partition", inspect_args.partition,
                      "Partitioning to inspect")
      ->check(CLI::IsMember({"iid", "noniid"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) return cmd_gen_corpus(gen_args);
  if (cal->parsed()) return cmd_calibrate(cal_args);
  if (run->parsed()) {
    if (seed_opt->count() > 0) run_args.seed = seed_flag;
    return cmd_run(run_args);
  }
  if (report->parsed()) return cmd_report(report_args);
  if (inspect->parsed()) return cmd_inspect_partition(inspect_args);
  return kExitUsage;
}
