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

#ifndef PRIVTEXT_SYNTH_H_
#define PRIVTEXT_SYNTH_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "privtext/corpus.h"

namespace privtext {

// Synthetic financial-sentiment corpus: template sentences whose verb
// phrases carry the label signal, with shared subjects, fillers, and noisy
// numeric amounts. Class counts follow mix_percent exactly (largest-
// remainder rounding); everything is a pure function of the seed.
struct SyntheticSpec {
  std::size_t size = 3000;
  // Percent per class, indexed by Label (negative, neutral, positive).
  std::array<int, kNumClasses> mix_percent = {12, 60, 28};
  std::uint64_t seed = 0;
};

// Raw examples (text + label only), ids sequential.
std::vector<LabeledExample> generate_synthetic(const SyntheticSpec& spec);

std::string format_corpus_line(const LabeledExample& ex, CorpusFormat format);

// Writes the corpus in the given on-disk format.
void write_synthetic_corpus(const std::string& path, const SyntheticSpec& spec,
                            CorpusFormat format);

}  // namespace privtext

#endif  // PRIVTEXT_SYNTH_H_
