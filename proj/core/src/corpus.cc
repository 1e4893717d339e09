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

#include "privtext/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "privtext/errors.h"
#include "privtext/hash.h"
#include "privtext/rng.h"

namespace privtext {

namespace {

std::string ascii_lower(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(
        std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

// Latin-1 byte -> UTF-8, so hashing sees one canonical byte stream no matter
// which encoding the file used.
std::string latin1_to_utf8(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  for (unsigned char c : in) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

const char* label_name(Label l) {
  switch (l) {
    case Label::kNegative:
      return "negative";
    case Label::kNeutral:
      return "neutral";
    case Label::kPositive:
      return "positive";
  }
  return "?";
}

bool parse_label(const std::string& s, Label* out) {
  const std::string t = ascii_lower(s);
  if (t == "negative") {
    *out = Label::kNegative;
  } else if (t == "neutral") {
    *out = Label::kNeutral;
  } else if (t == "positive") {
    *out = Label::kPositive;
  } else {
    return false;
  }
  return true;
}

std::vector<LabeledExample> load_corpus(const std::string& path,
                                        CorpusFormat format,
                                        CorpusEncoding encoding) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);

  std::vector<LabeledExample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (encoding == CorpusEncoding::kLatin1) line = latin1_to_utf8(line);

    std::string text, label_str;
    if (format == CorpusFormat::kPhrasebank) {
      // Sentences may contain '@'; the label always follows the last one.
      const auto at = line.rfind('@');
      if (at == std::string::npos) {
        throw ParseError("expected '<sentence>@<label>'", lineno);
      }
      text = line.substr(0, at);
      label_str = line.substr(at + 1);
    } else {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw ParseError("expected '<label>\\t<sentence>'", lineno);
      }
      label_str = line.substr(0, tab);
      text = line.substr(tab + 1);
    }

    LabeledExample ex;
    if (!parse_label(label_str, &ex.label)) {
      throw ParseError("unknown label \"" + label_str + "\"", lineno);
    }
    ex.id = static_cast<std::int64_t>(out.size());
    ex.text = std::move(text);
    out.push_back(std::move(ex));
  }
  if (in.bad()) throw IoError("read failure on corpus file: " + path);
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    const bool word = std::isalnum(c) != 0 || c >= 0x80;
    if (word) {
      cur.push_back(static_cast<char>(
          std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

FeaturizeResult featurize(const std::vector<LabeledExample>& raw,
                          const FeaturizeOptions& opts) {
  if (opts.feature_dim < 2) throw std::invalid_argument("feature_dim < 2");
  if (opts.vocab_hash_dim < 1) {
    throw std::invalid_argument("vocab_hash_dim < 1");
  }
  if (opts.max_tokens < 1) throw std::invalid_argument("max_tokens < 1");

  FeaturizeResult result;
  result.examples.reserve(raw.size());
  for (const LabeledExample& src : raw) {
    const std::vector<std::string> tokens = tokenize(src.text);
    if (tokens.empty()) {
      ++result.dropped;
      continue;
    }

    LabeledExample ex;
    ex.id = static_cast<std::int64_t>(result.examples.size());
    ex.text = src.text;
    ex.label = src.label;

    std::map<std::uint32_t, double> counts;
    for (const std::string& tok : tokens) {
      const std::uint64_t h = fnv1a64(tok);
      counts[static_cast<std::uint32_t>(h % opts.feature_dim)] += 1.0;
      if (ex.token_ids.size() < opts.max_tokens) {
        ex.token_ids.push_back(
            static_cast<std::uint32_t>(h % opts.vocab_hash_dim));
      }
    }
    double norm_sq = 0.0;
    for (const auto& [idx, c] : counts) norm_sq += c * c;
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    ex.features.reserve(counts.size());
    for (const auto& [idx, c] : counts) {
      ex.features.emplace_back(idx, c * inv_norm);
    }
    result.examples.push_back(std::move(ex));
  }
  return result;
}

std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>>
train_test_split(const std::vector<LabeledExample>& examples,
                 const SplitSpec& spec) {
  if (spec.train_fraction.num == 0 ||
      spec.train_fraction.num >= spec.train_fraction.den) {
    throw std::invalid_argument("train_fraction must be in (0, 1)");
  }
  const std::size_t n = examples.size();
  if (n < 5) throw std::invalid_argument("corpus too small to split (n < 5)");

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (spec.shuffle) seeded_shuffle(order, derive_seed(spec.seed, "split"));

  const std::size_t train_n =
      n * spec.train_fraction.num / spec.train_fraction.den;
  std::vector<LabeledExample> train, test;
  train.reserve(train_n);
  test.reserve(n - train_n);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledExample ex = examples[order[i]];
    if (i < train_n) {
      ex.id = static_cast<std::int64_t>(train.size());
      train.push_back(std::move(ex));
    } else {
      ex.id = static_cast<std::int64_t>(test.size());
      test.push_back(std::move(ex));
    }
  }
  return {std::move(train), std::move(test)};
}

namespace {

void fill_histogram(ClientPartition& part, const std::vector<Label>& labels) {
  part.label_histogram = {};
  for (std::uint32_t idx : part.example_indices) {
    ++part.label_histogram[static_cast<int>(labels[idx])];
  }
}

}  // namespace

std::vector<ClientPartition> partition_iid(
    std::uint32_t train_size, int num_clients, std::uint64_t seed,
    const std::vector<Label>& train_labels) {
  if (num_clients < 1) throw std::invalid_argument("num_clients < 1");
  if (train_size < static_cast<std::uint32_t>(num_clients)) {
    throw std::invalid_argument("more clients than train examples");
  }
  if (train_labels.size() != train_size) {
    throw std::invalid_argument("label list does not match train size");
  }

  std::vector<std::uint32_t> order(train_size);
  std::iota(order.begin(), order.end(), 0);
  seeded_shuffle(order, derive_seed(seed, "partition-iid"));

  std::vector<ClientPartition> parts(num_clients);
  for (int c = 0; c < num_clients; ++c) parts[c].client_id = c;
  for (std::uint32_t i = 0; i < train_size; ++i) {
    parts[i % num_clients].example_indices.push_back(order[i]);
  }
  for (ClientPartition& p : parts) {
    std::sort(p.example_indices.begin(), p.example_indices.end());
    fill_histogram(p, train_labels);
  }
  return parts;
}

std::vector<ClientPartition> partition_noniid_shards(
    const std::vector<Label>& train_labels, std::uint32_t shard_size,
    int shards_per_client, int num_clients, std::uint64_t seed) {
  if (shard_size < 1) throw std::invalid_argument("shard_size < 1");
  if (shards_per_client < 1) {
    throw std::invalid_argument("shards_per_client < 1");
  }
  if (num_clients < 1) throw std::invalid_argument("num_clients < 1");

  const std::uint32_t n = static_cast<std::uint32_t>(train_labels.size());
  const std::uint32_t num_shards = n / shard_size;
  if (num_shards < static_cast<std::uint32_t>(num_clients)) {
    throw std::invalid_argument(
        "not enough full shards: every client needs at least one (" +
        std::to_string(num_shards) + " shards, " +
        std::to_string(num_clients) + " clients)");
  }

  // Sort ordinals by label, ties by index; consecutive shards then tend to
  // be label-pure, which is the whole point of the construction.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return static_cast<int>(train_labels[a]) <
                            static_cast<int>(train_labels[b]);
                   });

  std::vector<std::uint32_t> shard_ids(num_shards);
  std::iota(shard_ids.begin(), shard_ids.end(), 0);
  seeded_shuffle(shard_ids, derive_seed(seed, "partition-shards"));

  std::vector<ClientPartition> parts(num_clients);
  for (int c = 0; c < num_clients; ++c) parts[c].client_id = c;

  // Deal shuffled shards round-robin until each client holds
  // shards_per_client or the deck is empty.
  std::size_t next = 0;
  for (int round = 0; round < shards_per_client && next < num_shards;
       ++round) {
    for (int c = 0; c < num_clients && next < num_shards; ++c, ++next) {
      const std::uint32_t s = shard_ids[next];
      for (std::uint32_t i = s * shard_size; i < (s + 1) * shard_size; ++i) {
        parts[c].example_indices.push_back(order[i]);
      }
    }
  }
  for (ClientPartition& p : parts) {
    std::sort(p.example_indices.begin(), p.example_indices.end());
    fill_histogram(p, train_labels);
  }
  return parts;
}

double partition_heterogeneity(
    const std::vector<ClientPartition>& partitions) {
  if (partitions.empty()) return 0.0;
  std::array<double, kNumClasses> global{};
  double total = 0.0;
  for (const ClientPartition& p : partitions) {
    for (int c = 0; c < kNumClasses; ++c) {
      global[c] += static_cast<double>(p.label_histogram[c]);
      total += static_cast<double>(p.label_histogram[c]);
    }
  }
  if (total == 0.0) return 0.0;
  for (double& g : global) g /= total;

  double sum_tv = 0.0;
  for (const ClientPartition& p : partitions) {
    const double n = static_cast<double>(p.size());
    if (n == 0.0) continue;
    double tv = 0.0;
    for (int c = 0; c < kNumClasses; ++c) {
      tv += std::abs(static_cast<double>(p.label_histogram[c]) / n -
                     global[c]);
    }
    sum_tv += 0.5 * tv;
  }
  return sum_tv / static_cast<double>(partitions.size());
}

}  // namespace privtext
