// Copyright 2026 The stochdd Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stochdd {

/// A gate kind that has no matrix representation (or is not implemented).
class UnsupportedGateError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Floating-point state left the regime the algorithms are valid in
/// (non-finite weights, norms far from 1, branch probabilities outside [0,1]).
class NumericDegeneracyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configured resource cap (qubit count, branch enumeration limit) was hit.
class ResourceLimitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A simulation run inside an ensemble failed; carries the failing run index.
class RunFailure : public std::runtime_error {
 public:
  RunFailure(std::size_t run_index, const std::string& message)
      : std::runtime_error("run " + std::to_string(run_index) + ": " + message),
        run_index_(run_index) {}
  [[nodiscard]] std::size_t run_index() const noexcept { return run_index_; }

 private:
  std::size_t run_index_;
};

/// Syntax error in an OpenQASM source; 1-based line and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  [[nodiscard]] int line() const noexcept { return line_; }
  [[nodiscard]] int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Syntactically valid OpenQASM using a construct outside the supported
/// subset (`if`, `opaque`, `reset`, unknown gates, OpenQASM 3 headers).
class UnsupportedConstructError : public ParseError {
 public:
  UnsupportedConstructError(int line, int column, const std::string& construct)
      : ParseError(line, column, "unsupported construct '" + construct + "'"),
        construct_(construct) {}
  [[nodiscard]] const std::string& construct() const noexcept {
    return construct_;
  }

 private:
  std::string construct_;
};

}  // namespace stochdd
