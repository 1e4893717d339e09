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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "privtext/corpus.h"
#include "privtext/errors.h"
#include "privtext/rng.h"
#include "privtext/synth.h"

using namespace privtext;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p;
}

std::vector<LabeledExample> raw_examples(std::size_t n) {
  SyntheticSpec spec;
  spec.size = n;
  spec.seed = 99;
  return generate_synthetic(spec);
}

}  // namespace

TEST_CASE("load_corpus phrasebank parses sentence and label") {
  const auto path = write_temp("pt_corpus_ok.txt",
                               "Profit rose .@positive\n"
                               "Sales fell sharply .@NEGATIVE\n"
                               "The firm is based in Espoo .@Neutral\n");
  const auto examples = load_corpus(path.string(),
                                    CorpusFormat::kPhrasebank);
  REQUIRE(examples.size() == 3);
  CHECK(examples[0].id == 0);
  CHECK(examples[0].text == "Profit rose .");
  CHECK(examples[0].label == Label::kPositive);
  CHECK(examples[1].id == 1);
  CHECK(examples[1].label == Label::kNegative);
  CHECK(examples[2].label == Label::kNeutral);
}

TEST_CASE("load_corpus splits on the last at-sign") {
  const auto path = write_temp("pt_corpus_at.txt",
                               "Email bob@corp.com for info .@neutral\n");
  const auto examples = load_corpus(path.string(),
                                    CorpusFormat::kPhrasebank);
  REQUIRE(examples.size() == 1);
  CHECK(examples[0].text == "Email bob@corp.com for info .");
  CHECK(examples[0].label == Label::kNeutral);
}

TEST_CASE("load_corpus tsv format") {
  const auto path = write_temp("pt_corpus_tsv.txt",
                               "positive\tProfit rose .\n"
                               "neutral\tFlat quarter .\n");
  const auto examples = load_corpus(path.string(), CorpusFormat::kTsv);
  REQUIRE(examples.size() == 2);
  CHECK(examples[0].label == Label::kPositive);
  CHECK(examples[1].text == "Flat quarter .");
}

TEST_CASE("load_corpus empty file gives empty list") {
  const auto path = write_temp("pt_corpus_empty.txt", "");
  CHECK(load_corpus(path.string(), CorpusFormat::kPhrasebank).empty());
}

TEST_CASE("load_corpus error paths") {
  CHECK_THROWS_AS(
      load_corpus("/nonexistent/privtext.txt", CorpusFormat::kPhrasebank),
      IoError);

  const auto no_sep = write_temp("pt_corpus_nosep.txt",
                                 "fine .@neutral\nno separator here\n");
  try {
    load_corpus(no_sep.string(), CorpusFormat::kPhrasebank);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  const auto bad_label = write_temp("pt_corpus_badlabel.txt",
                                    "fine .@neutral\nodd .@meh\n");
  try {
    load_corpus(bad_label.string(), CorpusFormat::kPhrasebank);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("meh") != std::string::npos);
  }
}

TEST_CASE("latin1 corpora transcode to the utf8 byte stream") {
  const std::string latin1_line = "yhti\xf6n tulos nousi .@positive\n";
  const auto p1 = write_temp("pt_corpus_l1.txt", latin1_line);
  const auto latin = load_corpus(p1.string(), CorpusFormat::kPhrasebank,
                                 CorpusEncoding::kLatin1);
  const std::string utf8_line = "yhti\xc3\xb6n tulos nousi .@positive\n";
  const auto p2 = write_temp("pt_corpus_u8.txt", utf8_line);
  const auto utf8 = load_corpus(p2.string(), CorpusFormat::kPhrasebank,
                                CorpusEncoding::kUtf8);
  REQUIRE(latin.size() == 1);
  REQUIRE(utf8.size() == 1);
  CHECK(latin[0].text == utf8[0].text);
}

TEST_CASE("tokenize lowercases and splits on punctuation") {
  CHECK(tokenize("Profit rose .") ==
        std::vector<std::string>{"profit", "rose"});
  CHECK(tokenize("EPS was 0.52, up 12%") ==
        std::vector<std::string>{"eps", "was", "0", "52", "up", "12"});
  CHECK(tokenize("...").empty());
}

TEST_CASE("featurize: repeated token folds to one unit-weight feature") {
  std::vector<LabeledExample> raw(1);
  raw[0].text = "Good good.";
  raw[0].label = Label::kPositive;
  FeaturizeOptions opts;
  opts.feature_dim = 1u << 18;
  const auto result = featurize(raw, opts);
  REQUIRE(result.examples.size() == 1);
  REQUIRE(result.examples[0].features.size() == 1);
  CHECK(result.examples[0].features[0].second == doctest::Approx(1.0));
  CHECK(result.examples[0].token_ids.size() == 2);
  CHECK(result.examples[0].token_ids[0] == result.examples[0].token_ids[1]);
}

TEST_CASE("featurize: unit Euclidean norm and determinism") {
  const auto raw = raw_examples(200);
  FeaturizeOptions opts;
  opts.feature_dim = 4096;
  opts.vocab_hash_dim = 512;
  opts.max_tokens = 16;
  const auto a = featurize(raw, opts);
  const auto b = featurize(raw, opts);
  REQUIRE(a.examples.size() == b.examples.size());
  for (std::size_t i = 0; i < a.examples.size(); ++i) {
    double norm_sq = 0.0;
    std::set<std::uint32_t> seen;
    for (const auto& [idx, w] : a.examples[i].features) {
      CHECK(idx < opts.feature_dim);
      CHECK(seen.insert(idx).second);  // no duplicate indices
      norm_sq += w * w;
    }
    CHECK(std::abs(std::sqrt(norm_sq) - 1.0) <= 1e-9);
    CHECK(a.examples[i].features == b.examples[i].features);
    CHECK(a.examples[i].token_ids == b.examples[i].token_ids);
    CHECK(a.examples[i].token_ids.size() <= opts.max_tokens);
    CHECK(!a.examples[i].token_ids.empty());
    for (auto id : a.examples[i].token_ids) CHECK(id < opts.vocab_hash_dim);
  }
}

TEST_CASE("featurize drops zero-token sentences with a count") {
  std::vector<LabeledExample> raw(3);
  raw[0].text = "profit rose";
  raw[1].text = "...";
  raw[2].text = "losses!";
  const auto result = featurize(raw, FeaturizeOptions{});
  CHECK(result.examples.size() == 2);
  CHECK(result.dropped == 1);
  CHECK(result.examples[0].id == 0);
  CHECK(result.examples[1].id == 1);
}

TEST_CASE("featurize precondition checks") {
  FeaturizeOptions opts;
  opts.feature_dim = 1;
  CHECK_THROWS_AS(featurize({}, opts), std::invalid_argument);
  opts.feature_dim = 4;
  opts.max_tokens = 0;
  CHECK_THROWS_AS(featurize({}, opts), std::invalid_argument);
}

TEST_CASE("train_test_split: 3453 sentences split 2762/691") {
  const auto examples = raw_examples(3453);
  SplitSpec spec;
  spec.seed = 5;
  auto [train, test] = train_test_split(examples, spec);
  CHECK(train.size() == 2762);
  CHECK(test.size() == 691);
}

TEST_CASE("train_test_split: tiny corpus, disjoint halves") {
  const auto examples = raw_examples(5);
  SplitSpec spec;
  auto [train, test] = train_test_split(examples, spec);
  CHECK(train.size() == 4);
  CHECK(test.size() == 1);
  std::set<std::string> texts;
  for (const auto& e : train) texts.insert(e.text);
  for (const auto& e : test) texts.insert(e.text);
  CHECK(texts.size() == 5);  // synthetic sentences are distinct here
}

TEST_CASE("train_test_split: determinism and seed sensitivity") {
  const auto examples = raw_examples(200);
  SplitSpec a;
  a.seed = 11;
  auto [t1, e1] = train_test_split(examples, a);
  auto [t2, e2] = train_test_split(examples, a);
  REQUIRE(t1.size() == t2.size());
  bool same = true;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    same = same && t1[i].text == t2[i].text;
  }
  CHECK(same);

  SplitSpec b;
  b.seed = 12;
  auto [t3, e3] = train_test_split(examples, b);
  bool differs = false;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    if (t1[i].text != t3[i].text) {
      differs = true;
      break;
    }
  }
  CHECK(differs);
}

TEST_CASE("train_test_split rejects tiny corpora") {
  CHECK_THROWS_AS(train_test_split(raw_examples(4), SplitSpec{}),
                  std::invalid_argument);
}

TEST_CASE("train_test_split without shuffle keeps file order") {
  const auto examples = raw_examples(10);
  SplitSpec spec;
  spec.shuffle = false;
  auto [train, test] = train_test_split(examples, spec);
  REQUIRE(train.size() == 8);
  REQUIRE(test.size() == 2);
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(train[i].text == examples[i].text);
  }
  CHECK(test[0].text == examples[8].text);
  CHECK(test[1].text == examples[9].text);
}

TEST_CASE("partition_iid: small exact case") {
  const std::vector<Label> labels(4, Label::kNeutral);
  const auto parts = partition_iid(4, 2, 7, labels);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].size() == 2);
  CHECK(parts[1].size() == 2);
  std::set<std::uint32_t> all;
  for (const auto& p : parts) {
    for (auto i : p.example_indices) CHECK(all.insert(i).second);
  }
  CHECK(all == std::set<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("partition_iid: 2400 examples over 10 clients") {
  const std::vector<Label> labels(2400, Label::kPositive);
  const auto parts = partition_iid(2400, 10, 3, labels);
  REQUIRE(parts.size() == 10);
  for (const auto& p : parts) CHECK(p.size() == 240);
}

TEST_CASE("partition_iid: label histograms stay close to global") {
  // Monte-Carlo property over 20 seeds: per-client label distribution
  // within total-variation 0.15 of the global one.
  const auto raw = raw_examples(1200);
  std::vector<Label> labels;
  for (const auto& e : raw) labels.push_back(e.label);
  std::array<double, kNumClasses> global{};
  for (Label l : labels) global[static_cast<int>(l)] += 1.0;
  for (double& g : global) g /= static_cast<double>(labels.size());

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto parts = partition_iid(
        static_cast<std::uint32_t>(labels.size()), 10, seed, labels);
    for (const auto& p : parts) {
      double tv = 0.0;
      for (int c = 0; c < kNumClasses; ++c) {
        tv += std::abs(static_cast<double>(p.label_histogram[c]) /
                           static_cast<double>(p.size()) -
                       global[c]);
      }
      CHECK(0.5 * tv < 0.15);
    }
  }
}

TEST_CASE("partition_iid errors") {
  const std::vector<Label> labels(3, Label::kNeutral);
  CHECK_THROWS_AS(partition_iid(3, 4, 0, labels), std::invalid_argument);
  CHECK_THROWS_AS(partition_iid(3, 0, 0, labels), std::invalid_argument);
}

TEST_CASE("partition_noniid_shards: 12-example hand case is label-pure") {
  std::vector<Label> labels;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 4; ++i) labels.push_back(static_cast<Label>(c));
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto parts = partition_noniid_shards(labels, 4, 1, 3, seed);
    REQUIRE(parts.size() == 3);
    std::set<std::uint32_t> all;
    for (const auto& p : parts) {
      CHECK(p.size() == 4);
      int nonzero = 0;
      for (int c = 0; c < kNumClasses; ++c) {
        if (p.label_histogram[c] > 0) ++nonzero;
      }
      CHECK(nonzero == 1);  // label-pure
      for (auto i : p.example_indices) CHECK(all.insert(i).second);
    }
    CHECK(all.size() == 12);
  }
}

TEST_CASE("partition_noniid_shards: 2762 examples leave a 122 tail") {
  // floor(2762 / 240) = 11 full shards; 2762 - 11*240 = 122 indices are
  // never dealt.
  const auto raw = raw_examples(2762);
  std::vector<Label> labels;
  for (const auto& e : raw) labels.push_back(e.label);
  const auto parts = partition_noniid_shards(labels, 240, 10, 10, 1);
  REQUIRE(parts.size() == 10);
  std::size_t assigned = 0;
  for (const auto& p : parts) {
    CHECK(p.size() >= 240);  // every client got at least one shard
    CHECK(p.size() % 240 == 0);
    assigned += p.size();
  }
  CHECK(assigned == 11 * 240);
  CHECK(2762 - assigned == 122);
}

TEST_CASE("partition_noniid_shards: single client single shard") {
  const std::vector<Label> labels(10, Label::kNeutral);
  const auto parts = partition_noniid_shards(labels, 6, 1, 1, 0);
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].size() == 6);
}

TEST_CASE("partition_noniid_shards: not enough shards fails") {
  const std::vector<Label> labels(10, Label::kNeutral);
  CHECK_THROWS_AS(partition_noniid_shards(labels, 6, 1, 2, 0),
                  std::invalid_argument);
}

TEST_CASE("partition property: disjoint and covering across a seed grid") {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    const std::uint32_t n =
        static_cast<std::uint32_t>(10 + rng.next_below(991));
    const int clients = static_cast<int>(1 + rng.next_below(20));
    if (n < static_cast<std::uint32_t>(clients)) continue;
    std::vector<Label> labels(n);
    for (auto& l : labels) {
      l = static_cast<Label>(rng.next_below(3));
    }

    const auto parts = partition_iid(n, clients, trial, labels);
    std::set<std::uint32_t> seen;
    std::size_t total = 0;
    std::size_t min_size = n, max_size = 0;
    for (const auto& p : parts) {
      std::int64_t hist_total = 0;
      for (auto h : p.label_histogram) hist_total += h;
      CHECK(hist_total == static_cast<std::int64_t>(p.size()));
      min_size = std::min(min_size, p.size());
      max_size = std::max(max_size, p.size());
      for (auto i : p.example_indices) {
        CHECK(i < n);
        CHECK(seen.insert(i).second);
      }
      total += p.size();
    }
    CHECK(total == n);  // full coverage
    CHECK(max_size - min_size <= 1);

    const std::uint32_t shard = 1 + static_cast<std::uint32_t>(
        rng.next_below(std::max<std::uint32_t>(1, n / clients)));
    const std::uint32_t num_shards = n / shard;
    if (num_shards < static_cast<std::uint32_t>(clients)) continue;
    const auto shard_parts = partition_noniid_shards(
        labels, shard, static_cast<int>(1 + rng.next_below(4)), clients,
        trial);
    std::set<std::uint32_t> sseen;
    std::size_t stotal = 0;
    for (const auto& p : shard_parts) {
      CHECK(!p.example_indices.empty());
      for (auto i : p.example_indices) {
        CHECK(i < n);
        CHECK(sseen.insert(i).second);
      }
      stotal += p.size();
    }
    CHECK(stotal % shard == 0);
    CHECK(n - stotal < n);  // tail bounded by construction
  }
}

TEST_CASE("partition_heterogeneity: bounds and extremes") {
  // Label-pure partitions of an even 3-class mix: TV distance from the
  // global distribution is 2/3 for every client.
  std::vector<Label> labels;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 4; ++i) labels.push_back(static_cast<Label>(c));
  }
  const auto pure = partition_noniid_shards(labels, 4, 1, 3, 2);
  CHECK(partition_heterogeneity(pure) == doctest::Approx(2.0 / 3.0));

  const auto iid = partition_iid(12, 3, 0, labels);
  const double h = partition_heterogeneity(iid);
  CHECK(h >= 0.0);
  CHECK(h <= 1.0);
}

TEST_CASE("synthetic corpus hits the exact class mix") {
  SyntheticSpec spec;
  spec.size = 1000;
  spec.seed = 4;
  const auto examples = generate_synthetic(spec);
  REQUIRE(examples.size() == 1000);
  std::array<int, kNumClasses> counts{};
  for (const auto& e : examples) ++counts[static_cast<int>(e.label)];
  CHECK(counts[static_cast<int>(Label::kNeutral)] == 600);
  CHECK(counts[static_cast<int>(Label::kPositive)] == 280);
  CHECK(counts[static_cast<int>(Label::kNegative)] == 120);

  CHECK_THROWS_AS(generate_synthetic(SyntheticSpec{10, {50, 40, 20}, 0}),
                  std::invalid_argument);
}

TEST_CASE("synthetic generation is deterministic and round-trips") {
  SyntheticSpec spec;
  spec.size = 50;
  spec.seed = 8;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].label == b[i].label);
  }

  const auto path = fs::temp_directory_path() / "pt_synth_roundtrip.txt";
  write_synthetic_corpus(path.string(), spec, CorpusFormat::kPhrasebank);
  const auto loaded = load_corpus(path.string(), CorpusFormat::kPhrasebank);
  REQUIRE(loaded.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(loaded[i].text == a[i].text);
    CHECK(loaded[i].label == a[i].label);
  }
}
