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

#include "privtext/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"
#include "privtext/errors.h"

namespace privtext {

namespace {

constexpr int kLayoutVersion = 1;
constexpr const char* kMagic = "privtext-params";

std::uint64_t to_le_bits(double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  return bits;
}

double from_le_bits(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  double x;
  std::memcpy(&x, &bits, sizeof(x));
  return x;
}

}  // namespace

void save_params(const std::string& path, const ParamVector& params,
                 const ModelConfig& config) {
  if (params.size() != param_count(config)) {
    throw std::invalid_argument("parameter count does not match config");
  }
  nlohmann::json header = {
      {"magic", kMagic},
      {"layout_version", kLayoutVersion},
      {"kind", model_kind_name(config.kind)},
      {"count", params.size()},
      {"config",
       {{"feature_dim", config.feature_dim},
        {"vocab_hash_dim", config.vocab_hash_dim},
        {"embed_dim", config.embed_dim},
        {"num_heads", config.num_heads},
        {"ff_dim", config.ff_dim},
        {"max_tokens", config.max_tokens},
        {"init_seed", config.init_seed}}},
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out << header.dump() << '\n';
  std::vector<std::uint64_t> buf(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    buf[i] = to_le_bits(params[i]);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(std::uint64_t)));
  if (!out) throw IoError("checkpoint write failure: " + path);
}

std::pair<ParamVector, ModelConfig> load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);

  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw ParseError("missing checkpoint header", 1);
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what(), 1);
  }
  if (header.value("magic", "") != kMagic) {
    throw ParseError("not a privtext checkpoint", 1);
  }
  if (header.value("layout_version", -1) != kLayoutVersion) {
    throw ParseError("unsupported checkpoint layout version", 1);
  }

  ModelConfig config;
  if (!parse_model_kind(header.value("kind", ""), &config.kind)) {
    throw ParseError("unknown model kind in checkpoint", 1);
  }
  const auto& jc = header.at("config");
  config.feature_dim = jc.at("feature_dim").get<std::uint32_t>();
  config.vocab_hash_dim = jc.at("vocab_hash_dim").get<std::uint32_t>();
  config.embed_dim = jc.at("embed_dim").get<std::uint32_t>();
  config.num_heads = jc.at("num_heads").get<std::uint32_t>();
  config.ff_dim = jc.at("ff_dim").get<std::uint32_t>();
  config.max_tokens = jc.at("max_tokens").get<std::uint32_t>();
  config.init_seed = jc.at("init_seed").get<std::uint64_t>();

  const std::size_t count = header.at("count").get<std::size_t>();
  if (count != param_count(config)) {
    throw ParseError("checkpoint count does not match its config", 1);
  }

  std::vector<std::uint64_t> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(count * sizeof(std::uint64_t)));
  if (static_cast<std::size_t>(in.gcount()) !=
      count * sizeof(std::uint64_t)) {
    throw IoError("checkpoint truncated: " + path);
  }

  ParamVector params;
  params.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    params.values[i] = from_le_bits(buf[i]);
  }
  return {std::move(params), config};
}

}  // namespace privtext
