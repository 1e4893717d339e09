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

#ifndef PRIVTEXT_CHECKPOINT_H_
#define PRIVTEXT_CHECKPOINT_H_

#include <string>
#include <utility>

#include "privtext/model.h"

namespace privtext {

// Parameter checkpoint: one line of JSON (model kind, config, layout
// version, count) followed by the raw little-endian 64-bit floats.
// Round-trips bit-exactly.
void save_params(const std::string& path, const ParamVector& params,
                 const ModelConfig& config);

std::pair<ParamVector, ModelConfig> load_params(const std::string& path);

}  // namespace privtext

#endif  // PRIVTEXT_CHECKPOINT_H_
