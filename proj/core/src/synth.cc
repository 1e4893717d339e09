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

#include "privtext/synth.h"

#include <fstream>
#include <stdexcept>

#include "privtext/errors.h"
#include "privtext/hash.h"
#include "privtext/rng.h"

namespace privtext {

namespace {

const char* const kSubjects[] = {
    "operating profit", "net sales",         "the company",
    "the group",        "quarterly revenue", "earnings per share",
    "the finnish firm", "cash flow",         "order intake",
    "market share",     "pretax profit",     "diluted eps",
};

const char* const kPositive[] = {
    "rose",
    "increased clearly",
    "improved from the year before",
    "climbed",
    "grew strongly",
    "exceeded market expectations",
    "reached a record level",
    "was up on the comparison period",
};

const char* const kNegative[] = {
    "fell",
    "dropped sharply",
    "declined from the year before",
    "decreased",
    "missed analyst estimates",
    "slumped",
    "was down on the comparison period",
    "weakened amid soft demand",
};

const char* const kNeutral[] = {
    "was reported for the period",
    "will be published next week",
    "remained at the previous level",
    "was booked in the fourth quarter",
    "is based in helsinki",
    "was discussed at the annual general meeting",
    "corresponds to the earlier guidance",
    "was measured under ifrs rules",
};

const char* const kFillers[] = {
    "in the first quarter",  "compared with a year earlier",
    "according to the interim report", "in the review period",
    "the company said",      "during the second half",
    "on a like for like basis",
};

template <std::size_t N>
const char* pick(const char* const (&arr)[N], SplitMix64& rng) {
  return arr[rng.next_below(N)];
}

std::string make_sentence(Label label, SplitMix64& rng) {
  std::string s = pick(kSubjects, rng);
  s += ' ';
  switch (label) {
    case Label::kPositive:
      s += pick(kPositive, rng);
      break;
    case Label::kNegative:
      s += pick(kNegative, rng);
      break;
    case Label::kNeutral:
      s += pick(kNeutral, rng);
      break;
  }
  if (rng.next_double() < 0.8) {
    s += ' ';
    s += pick(kFillers, rng);
  }
  if (rng.next_double() < 0.7) {
    // Noisy numeric amounts; the digit tokens dilute the label signal.
    const auto mn = rng.next_below(900) + 10;
    const auto frac = rng.next_below(10);
    s += " to eur " + std::to_string(mn) + "." + std::to_string(frac) + " mn";
    if (rng.next_double() < 0.5) {
      const auto prev = rng.next_below(900) + 10;
      s += " from eur " + std::to_string(prev) + " mn";
    }
  }
  s += " .";
  return s;
}

}  // namespace

std::vector<LabeledExample> generate_synthetic(const SyntheticSpec& spec) {
  int percent_total = 0;
  for (int p : spec.mix_percent) {
    if (p < 0) throw std::invalid_argument("negative class percentage");
    percent_total += p;
  }
  if (percent_total != 100) {
    throw std::invalid_argument("class mix must sum to 100 percent");
  }

  // Largest-remainder allocation so counts hit the mix exactly.
  std::array<std::size_t, kNumClasses> counts{};
  std::array<double, kNumClasses> remainders{};
  std::size_t assigned = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const double exact =
        static_cast<double>(spec.size) * spec.mix_percent[c] / 100.0;
    counts[c] = static_cast<std::size_t>(exact);
    remainders[c] = exact - static_cast<double>(counts[c]);
    assigned += counts[c];
  }
  while (assigned < spec.size) {
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
      if (remainders[c] > remainders[best]) best = c;
    }
    ++counts[best];
    remainders[best] = -1.0;
    ++assigned;
  }

  std::vector<Label> labels;
  labels.reserve(spec.size);
  for (int c = 0; c < kNumClasses; ++c) {
    labels.insert(labels.end(), counts[c], static_cast<Label>(c));
  }
  seeded_shuffle(labels, derive_seed(spec.seed, "synth-labels"));

  SplitMix64 rng(derive_seed(spec.seed, "synth-text"));
  std::vector<LabeledExample> out;
  out.reserve(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    LabeledExample ex;
    ex.id = static_cast<std::int64_t>(i);
    ex.label = labels[i];
    ex.text = make_sentence(ex.label, rng);
    out.push_back(std::move(ex));
  }
  return out;
}

std::string format_corpus_line(const LabeledExample& ex,
                               CorpusFormat format) {
  if (format == CorpusFormat::kPhrasebank) {
    return ex.text + "@" + label_name(ex.label);
  }
  return std::string(label_name(ex.label)) + "\t" + ex.text;
}

void write_synthetic_corpus(const std::string& path,
                            const SyntheticSpec& spec, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  for (const LabeledExample& ex : generate_synthetic(spec)) {
    out << format_corpus_line(ex, format) << '\n';
  }
  if (!out) throw IoError("write failure: " + path);
}

}  // namespace privtext
