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

#ifndef PRIVTEXT_TOML_H_
#define PRIVTEXT_TOML_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace privtext::toml {

// A deliberately small TOML subset: [table] / [table.sub] headers, bare and
// dotted keys, strings, integers, floats, booleans, single-line arrays of
// scalars, and # comments. Parse errors carry line and column. Keys
// flatten to dotted paths ("federated.num_clients").
struct Value {
  enum class Type { kBool, kInt, kFloat, kString, kArray };

  Type type = Type::kInt;
  bool b = false;
  std::int64_t i = 0;
  double d = 0.0;
  std::string s;
  std::vector<Value> array;  // scalar elements only
  int line = 0;
  int column = 0;

  // Coercions with clear failures; integers widen to double on demand.
  bool as_bool() const;
  std::int64_t as_int() const;
  std::uint64_t as_u64() const;
  double as_double() const;
  const std::string& as_string() const;
  const std::vector<Value>& as_array() const;

  std::string type_name() const;
};

struct Document {
  // Insertion-ordered is unnecessary; lookups dominate.
  std::map<std::string, Value> entries;

  bool contains(const std::string& dotted_key) const {
    return entries.count(dotted_key) > 0;
  }
};

Document parse_string(const std::string& text);
Document parse_file(const std::string& path);

// Parses the value half of a KEY=VALUE override with the same scalar/array
// grammar as file values.
Value parse_value_string(const std::string& text);

}  // namespace privtext::toml

#endif  // PRIVTEXT_TOML_H_
