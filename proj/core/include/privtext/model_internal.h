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

#ifndef PRIVTEXT_MODEL_INTERNAL_H_
#define PRIVTEXT_MODEL_INTERNAL_H_

#include <array>

#include "privtext/model.h"

namespace privtext::internal {

void check_params(const ParamVector& params, const ModelConfig& config);

std::array<double, kNumClasses> softmax3(
    const std::array<double, kNumClasses>& logits);

std::array<double, kNumClasses> linear_logits(const ParamVector& params,
                                              const LabeledExample& example,
                                              const ModelConfig& config);

std::array<double, kNumClasses> transformer_forward(
    const ParamVector& params, const LabeledExample& example,
    const ModelConfig& config, TransformerTrace* trace);

// Accumulates the cross-entropy gradient into grad_out (layout of
// ParamVector, pre-zeroed) and returns the loss.
double transformer_backward(const ParamVector& params,
                            const LabeledExample& example,
                            const ModelConfig& config, double* grad_out);

}  // namespace privtext::internal

#endif  // PRIVTEXT_MODEL_INTERNAL_H_
