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

#ifndef PRIVTEXT_CORPUS_H_
#define PRIVTEXT_CORPUS_H_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace privtext {

inline constexpr int kNumClasses = 3;

enum class Label : int { kNegative = 0, kNeutral = 1, kPositive = 2 };

const char* label_name(Label l);
// Case-insensitive; returns false for unknown strings.
bool parse_label(const std::string& s, Label* out);

// One sentence with hashed sparse features (for the linear model) and a
// token-id sequence (for the transformer). Features are unit-normalized
// term counts over an FNV-hashed vocabulary.
struct LabeledExample {
  std::int64_t id = 0;
  std::string text;
  std::vector<std::pair<std::uint32_t, double>> features;  // sorted by index
  std::vector<std::uint32_t> token_ids;
  Label label = Label::kNeutral;
};

enum class CorpusFormat { kPhrasebank, kTsv };
enum class CorpusEncoding { kUtf8, kLatin1 };

// Exact train fraction so split sizes are integer arithmetic, not float.
struct Rational {
  std::uint32_t num = 4;
  std::uint32_t den = 5;
};

struct SplitSpec {
  Rational train_fraction;       // must satisfy 0 < num/den < 1
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct ClientPartition {
  int client_id = 0;
  std::vector<std::uint32_t> example_indices;  // train-set ordinals
  std::array<std::int64_t, kNumClasses> label_histogram{};

  std::size_t size() const { return example_indices.size(); }
};

struct FeaturizeOptions {
  std::uint32_t feature_dim = 1u << 18;
  std::uint32_t vocab_hash_dim = 1u << 15;
  std::uint32_t max_tokens = 64;  // L_max
};

struct FeaturizeResult {
  std::vector<LabeledExample> examples;
  std::int64_t dropped = 0;  // sentences producing zero tokens
};

// Reads one example per line. phrasebank: "<sentence>@<label>" (split on the
// last '@'); tsv: "<label>\t<sentence>". Labels are matched
// case-insensitively. Any malformed line or unknown label fails the whole
// load with a ParseError carrying the 1-based line number; silently skipping
// lines would corrupt downstream DP sample rates.
std::vector<LabeledExample> load_corpus(
    const std::string& path, CorpusFormat format,
    CorpusEncoding encoding = CorpusEncoding::kUtf8);

// Lowercases, splits on non-alphanumeric boundaries, and hashes each token
// with FNV-1a into a feature index (mod feature_dim) and a token id
// (mod vocab_hash_dim). Feature weights are term counts scaled to unit
// Euclidean norm; token sequences are truncated to max_tokens. Examples with
// zero tokens are dropped and counted.
FeaturizeResult featurize(const std::vector<LabeledExample>& raw,
                          const FeaturizeOptions& opts);

// Tokenization used by featurize, exposed for tests and the synthetic
// generator: maximal runs of [a-z0-9] after ASCII lowercasing; bytes >= 0x80
// count as word characters.
std::vector<std::string> tokenize(const std::string& text);

// Deterministic shuffle + split. train gets floor(n * num / den) examples,
// test the remainder. Requires n >= 5.
std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>>
train_test_split(const std::vector<LabeledExample>& examples,
                 const SplitSpec& spec);

// Seeded uniform shuffle of [0, train_size) dealt round-robin; sizes differ
// by at most one and every index is assigned.
std::vector<ClientPartition> partition_iid(
    std::uint32_t train_size, int num_clients, std::uint64_t seed,
    const std::vector<Label>& train_labels);

// Label-sorted shard partitioning (the non-IID silo construction): sorts
// train ordinals by label (ties by index), cuts floor(n / shard_size)
// consecutive shards, shuffles shard order, and deals shards round-robin
// until every client holds shards_per_client shards or shards run out.
// The n mod shard_size tail stays unassigned. Requires at least num_clients
// shards so every client receives one.
std::vector<ClientPartition> partition_noniid_shards(
    const std::vector<Label>& train_labels, std::uint32_t shard_size,
    int shards_per_client, int num_clients, std::uint64_t seed);

// Mean over clients of the total-variation distance between the client's
// label distribution and the global one. Always in [0, 1].
double partition_heterogeneity(const std::vector<ClientPartition>& partitions);

}  // namespace privtext

#endif  // PRIVTEXT_CORPUS_H_
