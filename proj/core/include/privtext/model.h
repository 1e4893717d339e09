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

#ifndef PRIVTEXT_MODEL_H_
#define PRIVTEXT_MODEL_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "privtext/corpus.h"

namespace privtext {

// Flat, ordered vector of all model parameters. The layout is fixed per
// model configuration (see param_count below), which is what lets clipping,
// noising, checkpointing, and FedAvg treat every model as a plain vector.
struct ParamVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double* data() { return values.data(); }
  const double* data() const { return values.data(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

enum class ModelKind { kLinear, kTinyTransformer };

// Parameter layout, row-major within each block, blocks in this order.
//
// linear (num_classes = 3):
//   weights  [3 x feature_dim]   logit_c = sum_j w[c][j] x_j + b_c
//   bias     [3]
//   count = 3 * feature_dim + 3
//
// tiny_transformer (E = embed_dim, H = num_heads, F = ff_dim,
//                   V = vocab_hash_dim; one encoder block, post-norm,
//                   sinusoidal positions, mean-pooled head):
//   embed    [V x E]
//   wq [E x E], bq [E], wk [E x E], bk [E], wv [E x E], bv [E],
//   wo [E x E], bo [E]
//   ln1_gamma [E], ln1_beta [E]
//   w1 [E x F], b1 [F], w2 [F x E], b2 [E]
//   ln2_gamma [E], ln2_beta [E]
//   w_head [E x 3], b_head [3]
//   count = V*E + 4*(E*E + E) + 2*E + (E*F + F) + (F*E + E) + 2*E
//           + (3*E + 3)
struct ModelConfig {
  ModelKind kind = ModelKind::kLinear;
  std::uint32_t feature_dim = 1u << 18;     // linear input width
  std::uint32_t vocab_hash_dim = 1u << 15;  // transformer embedding rows
  std::uint32_t embed_dim = 16;
  std::uint32_t num_heads = 2;
  std::uint32_t ff_dim = 32;
  std::uint32_t max_tokens = 64;
  std::uint64_t init_seed = 0;
};

struct PerExampleGradient {
  std::int64_t example_id = 0;
  std::vector<double> grad;  // same layout and length as ParamVector
  double loss = 0.0;
};

// Optics into a transformer forward pass for invariant tests: per-head
// attention matrices (rows are probability vectors) and the pre-affine
// layer-norm outputs.
struct TransformerTrace {
  std::uint32_t seq_len = 0;
  // One row-major L x L matrix per head.
  std::vector<std::vector<double>> attention;
  // Row-major L x E, normalized but before gamma/beta.
  std::vector<double> ln1_hat;
  std::vector<double> ln2_hat;
};

std::size_t param_count(const ModelConfig& config);
void validate_config(const ModelConfig& config);

// linear: zeros. transformer: per-block seeded uniform in [-a, a] with
// a = sqrt(6 / (fan_in + fan_out)); biases and layer-norm betas zero,
// layer-norm gammas one.
ParamVector init_params(const ModelConfig& config);

// Class probabilities; strictly positive, sum 1 up to round-off.
std::array<double, kNumClasses> forward(const ParamVector& params,
                                        const LabeledExample& example,
                                        const ModelConfig& config);

// forward with internals captured (transformer only; linear leaves the
// trace empty).
std::array<double, kNumClasses> forward_traced(const ParamVector& params,
                                               const LabeledExample& example,
                                               const ModelConfig& config,
                                               TransformerTrace* trace);

// Cross-entropy loss of one example; the quantity per_example_grads
// differentiates.
double example_loss(const ParamVector& params, const LabeledExample& example,
                    const ModelConfig& config);

PerExampleGradient per_example_grad(const ParamVector& params,
                                    const LabeledExample& example,
                                    const ModelConfig& config);

// Exact analytic gradients, one per example, no batch coupling; output
// order matches input order.
std::vector<PerExampleGradient> per_example_grads(
    const ParamVector& params, std::span<const LabeledExample> batch,
    const ModelConfig& config);

// Fraction of examples whose argmax probability matches the label; ties
// break toward the lowest class index. Empty test set is an error.
double evaluate(const ParamVector& params,
                const std::vector<LabeledExample>& test,
                const ModelConfig& config);

const char* model_kind_name(ModelKind kind);
bool parse_model_kind(const std::string& s, ModelKind* out);

}  // namespace privtext

#endif  // PRIVTEXT_MODEL_H_
