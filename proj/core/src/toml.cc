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

#include "privtext/toml.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "privtext/errors.h"

namespace privtext::toml {

namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' ||
         c == '-';
}

class LineParser {
 public:
  LineParser(const std::string& line, int lineno)
      : line_(line), lineno_(lineno) {}

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t'))
      ++pos_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= line_.size() || line_[pos_] == '#';
  }

  char peek() const { return pos_ < line_.size() ? line_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, lineno_, static_cast<int>(pos_) + 1);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // bare key or dotted bare key
  std::string parse_key() {
    skip_ws();
    std::string key;
    while (true) {
      const std::size_t start = pos_;
      while (pos_ < line_.size() && is_bare_key_char(line_[pos_])) ++pos_;
      if (pos_ == start) fail("expected a key");
      key.append(line_, start, pos_ - start);
      if (peek() == '.') {
        ++pos_;
        key.push_back('.');
        continue;
      }
      return key;
    }
  }

  Value parse_value() {
    skip_ws();
    Value v;
    v.line = lineno_;
    v.column = static_cast<int>(pos_) + 1;
    const char c = peek();
    if (c == '"') {
      v.type = Value::Type::kString;
      v.s = parse_basic_string();
      return v;
    }
    if (c == '[') {
      ++pos_;
      v.type = Value::Type::kArray;
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.array.push_back(parse_value());
        if (v.array.back().type == Value::Type::kArray) {
          fail("nested arrays are not supported");
        }
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          skip_ws();
          if (peek() == ']') {  // trailing comma
            ++pos_;
            return v;
          }
          continue;
        }
        expect(']');
        return v;
      }
    }
    if (line_.compare(pos_, 4, "true") == 0 && !next_is_value_char(pos_ + 4)) {
      pos_ += 4;
      v.type = Value::Type::kBool;
      v.b = true;
      return v;
    }
    if (line_.compare(pos_, 5, "false") == 0 &&
        !next_is_value_char(pos_ + 5)) {
      pos_ += 5;
      v.type = Value::Type::kBool;
      v.b = false;
      return v;
    }
    return parse_number();
  }

 private:
  bool next_is_value_char(std::size_t p) const {
    return p < line_.size() && is_bare_key_char(line_[p]);
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= line_.size()) fail("unterminated string");
      const char c = line_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= line_.size()) fail("dangling escape");
        const char e = line_[pos_++];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default: fail("unsupported escape sequence");
        }
        continue;
      }
      out.push_back(c);
    }
  }

  Value parse_number() {
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    bool is_float = false;
    while (pos_ < line_.size()) {
      const char c = line_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_float = true;
        ++pos_;
        if (pos_ < line_.size() &&
            (line_[pos_] == '+' || line_[pos_] == '-')) {
          ++pos_;
        }
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected a value");
    const std::string_view text{line_.data() + start, pos_ - start};

    Value v;
    v.line = lineno_;
    v.column = static_cast<int>(start) + 1;
    if (!is_float) {
      std::int64_t i = 0;
      const auto [p, ec] =
          std::from_chars(text.data(), text.data() + text.size(), i);
      if (ec != std::errc() || p != text.data() + text.size()) {
        pos_ = start;
        fail("malformed integer");
      }
      v.type = Value::Type::kInt;
      v.i = i;
      return v;
    }
    double d = 0.0;
    const auto [p, ec] =
        std::from_chars(text.data(), text.data() + text.size(), d);
    if (ec != std::errc() || p != text.data() + text.size()) {
      pos_ = start;
      fail("malformed number");
    }
    v.type = Value::Type::kFloat;
    v.d = d;
    return v;
  }

  const std::string& line_;
  int lineno_;
  std::size_t pos_ = 0;
};

}  // namespace

bool Value::as_bool() const {
  if (type != Type::kBool) {
    throw ParseError("expected a boolean, got " + type_name(), line, column);
  }
  return b;
}

std::int64_t Value::as_int() const {
  if (type != Type::kInt) {
    throw ParseError("expected an integer, got " + type_name(), line,
                     column);
  }
  return i;
}

std::uint64_t Value::as_u64() const {
  const std::int64_t v = as_int();
  if (v < 0) {
    throw ParseError("expected a non-negative integer", line, column);
  }
  return static_cast<std::uint64_t>(v);
}

double Value::as_double() const {
  if (type == Type::kInt) return static_cast<double>(i);
  if (type != Type::kFloat) {
    throw ParseError("expected a number, got " + type_name(), line, column);
  }
  return d;
}

const std::string& Value::as_string() const {
  if (type != Type::kString) {
    throw ParseError("expected a string, got " + type_name(), line, column);
  }
  return s;
}

const std::vector<Value>& Value::as_array() const {
  if (type != Type::kArray) {
    throw ParseError("expected an array, got " + type_name(), line, column);
  }
  return array;
}

std::string Value::type_name() const {
  switch (type) {
    case Type::kBool: return "boolean";
    case Type::kInt: return "integer";
    case Type::kFloat: return "float";
    case Type::kString: return "string";
    case Type::kArray: return "array";
  }
  return "?";
}

Document parse_string(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    LineParser p(line, lineno);
    if (p.at_end_or_comment()) continue;

    if (p.peek() == '[') {
      p.expect('[');
      section = p.parse_key();
      p.expect(']');
      if (!p.at_end_or_comment()) p.fail("trailing characters after table");
      continue;
    }

    const std::string key = p.parse_key();
    p.skip_ws();
    p.expect('=');
    Value value = p.parse_value();
    if (!p.at_end_or_comment()) p.fail("trailing characters after value");

    const std::string dotted = section.empty() ? key : section + "." + key;
    if (doc.entries.count(dotted) > 0) {
      throw ParseError("duplicate key \"" + dotted + "\"", lineno);
    }
    doc.entries.emplace(dotted, std::move(value));
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

Value parse_value_string(const std::string& text) {
  LineParser p(text, 0);
  Value v = p.parse_value();
  if (!p.at_end_or_comment()) p.fail("trailing characters after value");
  return v;
}

}  // namespace privtext::toml
