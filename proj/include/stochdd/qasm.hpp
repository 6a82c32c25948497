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

#include <string>
#include <string_view>
#include <vector>

#include "stochdd/circuit.hpp"

namespace stochdd {

/// Parses an OpenQASM 2.0 subset sufficient for QASMBench-style inputs:
/// the OPENQASM header, include (ignored, noted), qreg/creg (flattened into a
/// single index space in declaration order; q[0] is simulator qubit 0, the
/// most significant), the built-in gates of GateKind plus their common qelib
/// spellings (u1/p, u2, cp/cu1, U, CX), user gate macros (inlined
/// recursively), pi-arithmetic angle expressions, measure, barrier (dropped)
/// and comments.
///
/// `if`, `opaque`, `reset` and unknown gates raise UnsupportedConstructError
/// naming the line and construct; malformed input raises ParseError with
/// line/column. Every input yields either a Circuit or one of these errors.
///
/// When `notes` is non-null, non-fatal remarks (e.g. ignored includes) are
/// appended to it.
Circuit parse_qasm(std::string_view source, std::string_view name = "qasm",
                   std::vector<std::string>* notes = nullptr);

}  // namespace stochdd
