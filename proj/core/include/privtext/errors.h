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

#ifndef PRIVTEXT_ERRORS_H_
#define PRIVTEXT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace privtext {

// File could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data. Carries a 1-based line number (0 = unknown) and,
// for config files, a column.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column = 0)
      : std::runtime_error(format(what, line, column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    std::string s = "line " + std::to_string(line);
    if (column > 0) s += ", column " + std::to_string(column);
    return s + ": " + what;
  }

  int line_;
  int column_;
};

// A structurally valid config with invalid or unknown contents.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace privtext

#endif  // PRIVTEXT_ERRORS_H_
