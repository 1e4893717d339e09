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

#include "privtext/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "privtext/model_internal.h"
#include "privtext/rng.h"
#include "privtext/hash.h"

namespace privtext {

namespace {

std::size_t transformer_param_count(const ModelConfig& c) {
  const std::size_t v = c.vocab_hash_dim, e = c.embed_dim, f = c.ff_dim;
  return v * e + 4 * (e * e + e) + 2 * e + (e * f + f) + (f * e + e) +
         2 * e + (3 * e + 3);
}

}  // namespace

std::size_t param_count(const ModelConfig& config) {
  validate_config(config);
  if (config.kind == ModelKind::kLinear) {
    return static_cast<std::size_t>(kNumClasses) * config.feature_dim +
           kNumClasses;
  }
  return transformer_param_count(config);
}

void validate_config(const ModelConfig& config) {
  if (config.kind == ModelKind::kLinear) {
    if (config.feature_dim < 1) {
      throw std::invalid_argument("feature_dim must be positive");
    }
    return;
  }
  if (config.embed_dim < 1 || config.num_heads < 1 || config.ff_dim < 1 ||
      config.vocab_hash_dim < 1 || config.max_tokens < 1) {
    throw std::invalid_argument("transformer dimensions must be positive");
  }
  if (config.embed_dim % config.num_heads != 0) {
    throw std::invalid_argument("embed_dim must be divisible by num_heads");
  }
}

namespace internal {

void check_params(const ParamVector& params, const ModelConfig& config) {
  if (params.size() != param_count(config)) {
    throw std::invalid_argument(
        "parameter vector length " + std::to_string(params.size()) +
        " does not match model layout " +
        std::to_string(param_count(config)));
  }
}

std::array<double, kNumClasses> softmax3(
    const std::array<double, kNumClasses>& logits) {
  const double m = std::max({logits[0], logits[1], logits[2]});
  std::array<double, kNumClasses> p;
  double z = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    p[c] = std::exp(logits[c] - m);
    z += p[c];
  }
  for (int c = 0; c < kNumClasses; ++c) p[c] /= z;
  return p;
}

std::array<double, kNumClasses> linear_logits(const ParamVector& params,
                                              const LabeledExample& example,
                                              const ModelConfig& config) {
  const std::size_t d = config.feature_dim;
  std::array<double, kNumClasses> logits;
  for (int c = 0; c < kNumClasses; ++c) {
    double acc = params[kNumClasses * d + c];  // bias block
    for (const auto& [idx, w] : example.features) {
      if (idx >= d) {
        throw std::invalid_argument("feature index out of range for model");
      }
      acc += params[static_cast<std::size_t>(c) * d + idx] * w;
    }
    logits[c] = acc;
  }
  return logits;
}

}  // namespace internal

ParamVector init_params(const ModelConfig& config) {
  const std::size_t n = param_count(config);
  ParamVector params;
  params.values.assign(n, 0.0);
  if (config.kind == ModelKind::kLinear) return params;

  const std::size_t v = config.vocab_hash_dim, e = config.embed_dim,
                    f = config.ff_dim;
  SplitMix64 rng(derive_seed(config.init_seed, "model-init"));
  double* p = params.data();
  const auto fill_uniform = [&rng](double* dst, std::size_t count,
                                   std::size_t fan_in, std::size_t fan_out) {
    const double a =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < count; ++i) {
      dst[i] = (2.0 * rng.next_double() - 1.0) * a;
    }
  };
  const auto fill_const = [](double* dst, std::size_t count, double value) {
    std::fill(dst, dst + count, value);
  };

  fill_uniform(p, v * e, v, e);
  p += v * e;
  for (int block = 0; block < 4; ++block) {  // wq, wk, wv, wo with biases
    fill_uniform(p, e * e, e, e);
    p += e * e;
    p += e;  // bias stays zero
  }
  fill_const(p, e, 1.0);  // ln1_gamma
  p += 2 * e;             // ln1_beta stays zero
  fill_uniform(p, e * f, e, f);
  p += e * f + f;
  fill_uniform(p, f * e, f, e);
  p += f * e + e;
  fill_const(p, e, 1.0);  // ln2_gamma
  p += 2 * e;
  fill_uniform(p, e * 3, e, 3);
  p += e * 3 + 3;

  return params;
}

std::array<double, kNumClasses> forward(const ParamVector& params,
                                        const LabeledExample& example,
                                        const ModelConfig& config) {
  return forward_traced(params, example, config, nullptr);
}

std::array<double, kNumClasses> forward_traced(const ParamVector& params,
                                               const LabeledExample& example,
                                               const ModelConfig& config,
                                               TransformerTrace* trace) {
  internal::check_params(params, config);
  if (config.kind == ModelKind::kLinear) {
    return internal::softmax3(internal::linear_logits(params, example,
                                                      config));
  }
  return internal::transformer_forward(params, example, config, trace);
}

double example_loss(const ParamVector& params, const LabeledExample& example,
                    const ModelConfig& config) {
  const auto p = forward(params, example, config);
  return -std::log(p[static_cast<int>(example.label)]);
}

PerExampleGradient per_example_grad(const ParamVector& params,
                                    const LabeledExample& example,
                                    const ModelConfig& config) {
  internal::check_params(params, config);
  PerExampleGradient out;
  out.example_id = example.id;
  out.grad.assign(params.size(), 0.0);

  if (config.kind == ModelKind::kLinear) {
    const auto p =
        internal::softmax3(internal::linear_logits(params, example, config));
    const int y = static_cast<int>(example.label);
    out.loss = -std::log(p[y]);
    const std::size_t d = config.feature_dim;
    for (int c = 0; c < kNumClasses; ++c) {
      const double delta = p[c] - (c == y ? 1.0 : 0.0);
      for (const auto& [idx, w] : example.features) {
        out.grad[static_cast<std::size_t>(c) * d + idx] += delta * w;
      }
      out.grad[kNumClasses * d + c] = delta;
    }
    return out;
  }

  out.loss = internal::transformer_backward(params, example, config,
                                            out.grad.data());
  return out;
}

std::vector<PerExampleGradient> per_example_grads(
    const ParamVector& params, std::span<const LabeledExample> batch,
    const ModelConfig& config) {
  if (batch.empty()) throw std::invalid_argument("empty gradient batch");
  std::vector<PerExampleGradient> out;
  out.reserve(batch.size());
  for (const LabeledExample& ex : batch) {
    out.push_back(per_example_grad(params, ex, config));
  }
  return out;
}

double evaluate(const ParamVector& params,
                const std::vector<LabeledExample>& test,
                const ModelConfig& config) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  std::int64_t correct = 0;
  for (const LabeledExample& ex : test) {
    const auto p = forward(params, ex, config);
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c) {
      if (p[c] > p[best]) best = c;
    }
    if (best == static_cast<int>(ex.label)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

const char* model_kind_name(ModelKind kind) {
  return kind == ModelKind::kLinear ? "linear" : "tiny_transformer";
}

bool parse_model_kind(const std::string& s, ModelKind* out) {
  if (s == "linear") {
    *out = ModelKind::kLinear;
  } else if (s == "tiny_transformer") {
    *out = ModelKind::kTinyTransformer;
  } else {
    return false;
  }
  return true;
}

}  // namespace privtext
