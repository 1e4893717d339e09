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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "privtext/errors.h"
#include "privtext/harness.h"

namespace privtext {

namespace {

// Shortest round-trip decimal form; deterministic across platforms with a
// correct to_chars.
std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

}  // namespace

std::string run_result_json(const RunResult& result) {
  nlohmann::json j;
  j["setup"] = setup_name(result.setup);
  if (result.epsilon.has_value()) j["epsilon"] = *result.epsilon;
  j["run_index"] = result.run_index;
  j["seed"] = result.seed;
  j["ok"] = result.ok;
  if (result.ok) {
    j["accuracy"] = result.accuracy;
    if (result.achieved_epsilon.has_value()) {
      j["achieved_epsilon"] = *result.achieved_epsilon;
    }
  } else {
    j["fail_reason"] = result.fail_reason;
  }
  return j.dump();
}

RunResult parse_run_result_json(const std::string& line, int lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad run record: ") + e.what(), lineno);
  }
  RunResult r;
  try {
    if (!parse_setup(j.at("setup").get<std::string>(), &r.setup)) {
      throw ParseError("unknown setup name", lineno);
    }
    if (j.contains("epsilon")) r.epsilon = j.at("epsilon").get<double>();
    r.run_index = j.at("run_index").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = j.at("ok").get<bool>();
    if (r.ok) {
      r.accuracy = j.at("accuracy").get<double>();
      if (j.contains("achieved_epsilon")) {
        r.achieved_epsilon = j.at("achieved_epsilon").get<double>();
      }
    } else if (j.contains("fail_reason")) {
      r.fail_reason = j.at("fail_reason").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad run record: ") + e.what(), lineno);
  }
  return r;
}

void write_runs_jsonl(const std::string& path,
                      const std::vector<RunResult>& runs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const RunResult& r : runs) out << run_result_json(r) << '\n';
  if (!out) throw IoError("write failure: " + path);
}

std::vector<RunResult> read_runs_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open runs file: " + path);
  std::vector<RunResult> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse_run_result_json(line, lineno));
  }
  return out;
}

void write_summary_csv(const std::string& path,
                       const std::vector<CellSummary>& cells) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "setup,epsilon,mean_accuracy,std_accuracy,n_runs\n";
  for (const CellSummary& c : cells) {
    out << setup_name(c.setup) << ',';
    if (c.epsilon.has_value()) out << format_double(*c.epsilon);
    out << ',' << format_double(c.mean_accuracy) << ','
        << format_double(c.std_accuracy) << ',' << c.n_runs << '\n';
  }
  if (!out) throw IoError("write failure: " + path);
}

std::string format_cell(double mean_fraction, double std_fraction) {
  return format_percent(mean_fraction) + " ± " +
         format_percent(std_fraction);
}

void render_table(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "Setup            Epsilon   Accuracy (mean ± std)   Runs\n";
  out << "-----            -------   ---------------------   ----\n";
  for (const CellSummary& c : cells) {
    char line[160];
    std::string eps;
    if (c.epsilon.has_value()) {
      char eb[32];
      std::snprintf(eb, sizeof(eb), "%g", *c.epsilon);
      eps = eb;
    }
    std::snprintf(line, sizeof(line), "%-16s %-9s %-23s %d%s\n",
                  setup_name(c.setup), eps.c_str(),
                  format_cell(c.mean_accuracy, c.std_accuracy).c_str(),
                  c.n_runs, c.flagged ? "  [flagged]" : "");
    out << line;
  }
}

}  // namespace privtext
