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
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stochdd {

/// Qubit index. Qubit 0 is the MOST significant bit of a basis-state index
/// everywhere in this project: bitstrings read q0 first, and amplitude
/// vectors are indexed with q0 as the top bit. OpenQASM `q[0]` maps to q0.
using Qubit = std::uint32_t;

enum class GateKind {
  I,
  X,
  Y,
  Z,
  H,
  S,
  Sdg,
  T,
  Tdg,
  RX,
  RY,
  RZ,
  Phase,
  U3,
  CX,
  CZ,
  CCX,
  Swap,
  Measure,
  Barrier,
};

/// One gate application. Controlled kinds keep their control qubits in
/// `controls` (CX/CZ: one, CCX: two); extra controls are also accepted on
/// single-target kinds and Swap, turning them into multi-controlled gates.
struct GateOp {
  GateKind kind = GateKind::I;
  std::vector<double> params;    // angles in radians
  std::vector<Qubit> targets;
  std::vector<Qubit> controls;

  bool operator==(const GateOp&) const = default;
};

struct Circuit {
  std::size_t num_qubits = 0;
  std::vector<GateOp> ops;
  std::string name;
};

[[nodiscard]] std::string_view gate_name(GateKind kind);
[[nodiscard]] std::size_t gate_param_count(GateKind kind);
/// Number of target qubits (Swap: 2; Measure/Barrier: variable, returns 0).
[[nodiscard]] std::size_t gate_target_count(GateKind kind);

/// Entanglement benchmark: H on q0 followed by a CX chain
/// q0->q1, q1->q2, ..., producing (|0...0> + |1...1>)/sqrt(2).
Circuit generate_ghz(std::size_t n);

/// Textbook quantum Fourier transform: per qubit k an H followed by
/// controlled phases pi/2^(j-k) from qubits j > k, then a swap reversal
/// layer. Controlled phases stay 2-qubit diagonal gates; they are not
/// decomposed into a hardware basis.
Circuit generate_qft(std::size_t n);

/// Structural checks: index bounds, target/control overlap, parameter and
/// control arity, measurements only as a trailing block. Returns all
/// violations; empty means valid.
std::vector<std::string> validate(const Circuit& circuit);

/// Debug facility: render as OpenQASM 2.0 text that parses back to an
/// op-identical circuit.
std::string emit_qasm(const Circuit& circuit);

/// Sorted, deduplicated union of targets and controls.
std::vector<Qubit> operand_qubits(const GateOp& op);

}  // namespace stochdd
