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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "privtext/errors.h"
#include "privtext/harness.h"

namespace privtext {

namespace {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "corpus.path",
      "corpus.format",
      "corpus.encoding",
      "corpus.feature_dim",
      "corpus.vocab_hash_dim",
      "corpus.max_tokens",
      "split.train_fraction",
      "split.seed",
      "split.shuffle",
      "model.kind",
      "model.embed_dim",
      "model.num_heads",
      "model.ff_dim",
      "model.init_seed",
      "experiment.setups",
      "experiment.epsilons",
      "experiment.delta",
      "experiment.repeats",
      "experiment.master_seed",
      "experiment.resplit_per_run",
      "centralized.epochs",
      "centralized.lot_size",
      "centralized.learning_rate",
      "dp.clip_norm",
      "federated.num_clients",
      "federated.client_fraction",
      "federated.rounds",
      "federated.local_epochs",
      "federated.local_lot_size",
      "federated.weighting",
      "federated.sampling_seed",
      "federated.learning_rate",
      "federated.noniid.shard_size",
      "federated.noniid.shards_per_client",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Dotted keys must be exact; a bare key resolves by unique trailing
// component so `--set repeats=1` reaches experiment.repeats.
std::string resolve_override_key(const std::string& key) {
  const auto& keys = known_keys();
  if (key.find('.') != std::string::npos) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
    return key;
  }
  std::vector<std::string> matches;
  for (const std::string& k : keys) {
    const auto dot = k.rfind('.');
    if (k.substr(dot + 1) == key) matches.push_back(k);
  }
  if (matches.empty()) {
    throw ConfigError("unknown config key \"" + key + "\"");
  }
  if (matches.size() > 1) {
    std::string msg = "ambiguous key \"" + key + "\": matches";
    for (const std::string& m : matches) msg += " " + m;
    throw ConfigError(msg);
  }
  return matches.front();
}

const toml::Value* find(const toml::Document& doc, const std::string& key) {
  const auto it = doc.entries.find(key);
  return it == doc.entries.end() ? nullptr : &it->second;
}

std::int64_t get_int(const toml::Document& doc, const std::string& key,
                     std::int64_t def) {
  const toml::Value* v = find(doc, key);
  return v == nullptr ? def : v->as_int();
}

std::uint64_t get_u64(const toml::Document& doc, const std::string& key,
                      std::uint64_t def) {
  const toml::Value* v = find(doc, key);
  return v == nullptr ? def : v->as_u64();
}

double get_double(const toml::Document& doc, const std::string& key,
                  double def) {
  const toml::Value* v = find(doc, key);
  return v == nullptr ? def : v->as_double();
}

bool get_bool(const toml::Document& doc, const std::string& key, bool def) {
  const toml::Value* v = find(doc, key);
  return v == nullptr ? def : v->as_bool();
}

std::string get_string(const toml::Document& doc, const std::string& key,
                       const std::string& def) {
  const toml::Value* v = find(doc, key);
  return v == nullptr ? def : v->as_string();
}

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0)) bad(key + " must be positive");
}

void require_at_least(std::int64_t v, std::int64_t floor,
                      const std::string& key) {
  if (v < floor) {
    bad(key + " must be >= " + std::to_string(floor));
  }
}

}  // namespace

// Shells strip TOML quotes from --set values, so anything that fails the
// value grammar is taken as a bare string ("--set model.kind=linear").
toml::Value parse_override_value(const std::string& text) {
  try {
    return toml::parse_value_string(text);
  } catch (const ParseError&) {
    toml::Value v;
    v.type = toml::Value::Type::kString;
    v.s = trim(text);
    return v;
  }
}

ExperimentConfig config_from_document(
    const toml::Document& doc_in, const std::vector<std::string>& overrides) {
  toml::Document doc = doc_in;
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) {
      bad("override must be KEY=VALUE, got \"" + ov + "\"");
    }
    const std::string key = resolve_override_key(trim(ov.substr(0, eq)));
    toml::Value value = parse_override_value(ov.substr(eq + 1));
    doc.entries.erase(key);
    doc.entries.emplace(key, std::move(value));
  }

  const auto& keys = known_keys();
  for (const auto& [key, value] : doc.entries) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      bad("unknown config key \"" + key + "\" (line " +
          std::to_string(value.line) + ")");
    }
  }

  ExperimentConfig config;

  config.corpus_path = get_string(doc, "corpus.path", "");
  if (config.corpus_path.empty()) bad("corpus.path is required");
  const std::string format = get_string(doc, "corpus.format", "phrasebank");
  if (format == "phrasebank") {
    config.corpus_format = CorpusFormat::kPhrasebank;
  } else if (format == "tsv") {
    config.corpus_format = CorpusFormat::kTsv;
  } else {
    bad("corpus.format must be \"phrasebank\" or \"tsv\"");
  }
  const std::string encoding = get_string(doc, "corpus.encoding", "utf8");
  if (encoding == "utf8") {
    config.corpus_encoding = CorpusEncoding::kUtf8;
  } else if (encoding == "latin1") {
    config.corpus_encoding = CorpusEncoding::kLatin1;
  } else {
    bad("corpus.encoding must be \"utf8\" or \"latin1\"");
  }
  config.featurize.feature_dim = static_cast<std::uint32_t>(
      get_int(doc, "corpus.feature_dim", 1 << 18));
  config.featurize.vocab_hash_dim = static_cast<std::uint32_t>(
      get_int(doc, "corpus.vocab_hash_dim", 1 << 15));
  config.featurize.max_tokens =
      static_cast<std::uint32_t>(get_int(doc, "corpus.max_tokens", 64));
  require_at_least(config.featurize.feature_dim, 2, "corpus.feature_dim");
  require_at_least(config.featurize.vocab_hash_dim, 1,
                   "corpus.vocab_hash_dim");
  require_at_least(config.featurize.max_tokens, 1, "corpus.max_tokens");

  if (const toml::Value* frac = find(doc, "split.train_fraction")) {
    const auto& arr = frac->as_array();
    if (arr.size() != 2) {
      bad("split.train_fraction must be [numerator, denominator]");
    }
    config.split.train_fraction.num =
        static_cast<std::uint32_t>(arr[0].as_u64());
    config.split.train_fraction.den =
        static_cast<std::uint32_t>(arr[1].as_u64());
  }
  if (config.split.train_fraction.num == 0 ||
      config.split.train_fraction.num >= config.split.train_fraction.den) {
    bad("split.train_fraction must lie strictly between 0 and 1");
  }
  config.split.seed = get_u64(doc, "split.seed", 0);
  config.split.shuffle = get_bool(doc, "split.shuffle", true);

  const std::string kind = get_string(doc, "model.kind", "linear");
  if (!parse_model_kind(kind, &config.model.kind)) {
    bad("model.kind must be \"linear\" or \"tiny_transformer\"");
  }
  config.model.feature_dim = config.featurize.feature_dim;
  config.model.vocab_hash_dim = config.featurize.vocab_hash_dim;
  config.model.max_tokens = config.featurize.max_tokens;
  config.model.embed_dim =
      static_cast<std::uint32_t>(get_int(doc, "model.embed_dim", 16));
  config.model.num_heads =
      static_cast<std::uint32_t>(get_int(doc, "model.num_heads", 2));
  config.model.ff_dim =
      static_cast<std::uint32_t>(get_int(doc, "model.ff_dim", 32));
  config.model.init_seed = get_u64(doc, "model.init_seed", 0);
  try {
    validate_config(config.model);
  } catch (const std::invalid_argument& e) {
    bad(std::string("model config: ") + e.what());
  }

  const toml::Value* setups = find(doc, "experiment.setups");
  if (setups == nullptr) bad("experiment.setups is required");
  std::set<std::string> seen_setups;
  for (const toml::Value& v : setups->as_array()) {
    Setup s;
    if (!parse_setup(v.as_string(), &s)) {
      bad("unknown setup \"" + v.as_string() + "\"");
    }
    if (!seen_setups.insert(v.as_string()).second) {
      bad("duplicate setup \"" + v.as_string() + "\"");
    }
    config.setups.push_back(s);
  }
  if (config.setups.empty()) bad("experiment.setups must not be empty");

  if (const toml::Value* eps = find(doc, "experiment.epsilons")) {
    for (const toml::Value& v : eps->as_array()) {
      const double e = v.as_double();
      if (!(e > 0.0)) bad("epsilon values must be positive");
      config.epsilons.push_back(e);
    }
  }
  const bool any_dp = std::any_of(config.setups.begin(), config.setups.end(),
                                  setup_uses_epsilon);
  if (any_dp && config.epsilons.empty()) {
    bad("experiment.epsilons must be non-empty when a DP setup is present");
  }

  config.delta = get_double(doc, "experiment.delta", 1e-5);
  if (!(config.delta > 0.0) || !(config.delta < 1.0)) {
    bad("experiment.delta must lie in (0, 1)");
  }
  config.repeats =
      static_cast<int>(get_int(doc, "experiment.repeats", 3));
  require_at_least(config.repeats, 1, "experiment.repeats");
  config.master_seed = get_u64(doc, "experiment.master_seed", 0);
  config.resplit_per_run =
      get_bool(doc, "experiment.resplit_per_run", false);

  config.centralized.epochs =
      static_cast<int>(get_int(doc, "centralized.epochs", 5));
  config.centralized.lot_size =
      static_cast<std::uint32_t>(get_int(doc, "centralized.lot_size", 32));
  config.centralized.learning_rate =
      get_double(doc, "centralized.learning_rate", 0.1);
  require_at_least(config.centralized.epochs, 1, "centralized.epochs");
  require_at_least(config.centralized.lot_size, 1, "centralized.lot_size");
  require_positive(config.centralized.learning_rate,
                   "centralized.learning_rate");

  config.clip_norm = get_double(doc, "dp.clip_norm", 1.0);
  require_positive(config.clip_norm, "dp.clip_norm");

  config.federated.num_clients =
      static_cast<int>(get_int(doc, "federated.num_clients", 10));
  config.federated.client_fraction =
      get_double(doc, "federated.client_fraction", 0.5);
  config.federated.rounds =
      static_cast<int>(get_int(doc, "federated.rounds", 20));
  config.federated.local_epochs =
      static_cast<int>(get_int(doc, "federated.local_epochs", 1));
  config.federated.local_lot_size = static_cast<std::uint32_t>(
      get_int(doc, "federated.local_lot_size", 32));
  config.federated.learning_rate =
      get_double(doc, "federated.learning_rate", 0.1);
  config.federated.sampling_seed =
      get_u64(doc, "federated.sampling_seed", 0);
  const std::string weighting =
      get_string(doc, "federated.weighting", "by_example_count");
  if (weighting == "by_example_count") {
    config.federated.weighting = Weighting::kByExampleCount;
  } else if (weighting == "uniform") {
    config.federated.weighting = Weighting::kUniform;
  } else {
    bad("federated.weighting must be \"by_example_count\" or \"uniform\"");
  }
  require_at_least(config.federated.num_clients, 1,
                   "federated.num_clients");
  if (!(config.federated.client_fraction > 0.0) ||
      config.federated.client_fraction > 1.0) {
    bad("federated.client_fraction must lie in (0, 1]");
  }
  require_at_least(config.federated.rounds, 1, "federated.rounds");
  require_at_least(config.federated.local_epochs, 1,
                   "federated.local_epochs");
  require_at_least(config.federated.local_lot_size, 1,
                   "federated.local_lot_size");
  require_positive(config.federated.learning_rate,
                   "federated.learning_rate");

  config.noniid.shard_size = static_cast<std::uint32_t>(
      get_int(doc, "federated.noniid.shard_size", 240));
  config.noniid.shards_per_client = static_cast<int>(
      get_int(doc, "federated.noniid.shards_per_client", 10));
  require_at_least(config.noniid.shard_size, 1,
                   "federated.noniid.shard_size");
  require_at_least(config.noniid.shards_per_client, 1,
                   "federated.noniid.shards_per_client");

  return config;
}

ExperimentConfig load_experiment_config(
    const std::string& path, const std::vector<std::string>& overrides) {
  return config_from_document(toml::parse_file(path), overrides);
}

}  // namespace privtext
