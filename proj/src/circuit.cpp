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

#include "stochdd/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <stdexcept>

namespace stochdd {

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::I: return "id";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::H: return "h";
    case GateKind::S: return "s";
    case GateKind::Sdg: return "sdg";
    case GateKind::T: return "t";
    case GateKind::Tdg: return "tdg";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::Phase: return "p";
    case GateKind::U3: return "u3";
    case GateKind::CX: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::CCX: return "ccx";
    case GateKind::Swap: return "swap";
    case GateKind::Measure: return "measure";
    case GateKind::Barrier: return "barrier";
  }
  return "?";
}

std::size_t gate_param_count(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::Phase:
      return 1;
    case GateKind::U3:
      return 3;
    default:
      return 0;
  }
}

std::size_t gate_target_count(GateKind kind) {
  switch (kind) {
    case GateKind::Swap:
      return 2;
    case GateKind::Measure:
    case GateKind::Barrier:
      return 0;
    default:
      return 1;
  }
}

namespace {

// Required control count; single-target kinds and Swap accept any number.
std::size_t fixed_control_count(GateKind kind, bool& is_fixed) {
  is_fixed = true;
  switch (kind) {
    case GateKind::CX:
    case GateKind::CZ:
      return 1;
    case GateKind::CCX:
      return 2;
    case GateKind::Measure:
    case GateKind::Barrier:
      return 0;
    default:
      is_fixed = false;
      return 0;
  }
}

}  // namespace

std::vector<Qubit> operand_qubits(const GateOp& op) {
  std::vector<Qubit> qs(op.targets);
  qs.insert(qs.end(), op.controls.begin(), op.controls.end());
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  return qs;
}

Circuit generate_ghz(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("generate_ghz: qubit count must be >= 1");
  }
  Circuit c;
  c.num_qubits = n;
  c.name = "ghz_" + std::to_string(n);
  c.ops.push_back({GateKind::H, {}, {0}, {}});
  for (Qubit q = 0; q + 1 < n; ++q) {
    c.ops.push_back({GateKind::CX, {}, {q + 1}, {q}});
  }
  return c;
}

Circuit generate_qft(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("generate_qft: qubit count must be >= 1");
  }
  Circuit c;
  c.num_qubits = n;
  c.name = "qft_" + std::to_string(n);
  for (Qubit k = 0; k < n; ++k) {
    c.ops.push_back({GateKind::H, {}, {k}, {}});
    for (Qubit j = k + 1; j < n; ++j) {
      const double angle = std::numbers::pi / std::pow(2.0, j - k);
      c.ops.push_back({GateKind::Phase, {angle}, {k}, {j}});
    }
  }
  for (Qubit i = 0; i < n / 2; ++i) {
    c.ops.push_back(
        {GateKind::Swap, {}, {i, static_cast<Qubit>(n - 1 - i)}, {}});
  }
  return c;
}

std::vector<std::string> validate(const Circuit& circuit) {
  std::vector<std::string> issues;
  const std::size_t n = circuit.num_qubits;
  if (n == 0) {
    issues.push_back("circuit has zero qubits");
  }
  bool measuring = false;
  for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
    const GateOp& op = circuit.ops[i];
    const std::string where =
        "op " + std::to_string(i) + " (" + std::string(gate_name(op.kind)) + ")";

    if (op.kind == GateKind::Measure) {
      measuring = true;
    } else if (measuring && op.kind != GateKind::Barrier) {
      issues.push_back(where + ": gate after measurement; measurements must "
                               "form a trailing block");
    }

    const std::size_t want_targets = gate_target_count(op.kind);
    if (want_targets != 0 && op.targets.size() != want_targets) {
      issues.push_back(where + ": expected " + std::to_string(want_targets) +
                       " target(s), got " + std::to_string(op.targets.size()));
    }
    if (op.kind == GateKind::Measure && op.targets.empty()) {
      issues.push_back(where + ": measurement without targets");
    }

    bool fixed = false;
    const std::size_t want_controls = fixed_control_count(op.kind, fixed);
    if (fixed && op.controls.size() != want_controls) {
      issues.push_back(where + ": expected " + std::to_string(want_controls) +
                       " control(s), got " + std::to_string(op.controls.size()));
    }

    const std::size_t want_params = gate_param_count(op.kind);
    if (op.params.size() != want_params) {
      issues.push_back(where + ": expected " + std::to_string(want_params) +
                       " parameter(s), got " + std::to_string(op.params.size()));
    }
    for (double p : op.params) {
      if (!std::isfinite(p)) {
        issues.push_back(where + ": non-finite parameter");
        break;
      }
    }

    std::set<Qubit> seen;
    for (Qubit q : op.targets) {
      if (q >= n) {
        issues.push_back(where + ": target q" + std::to_string(q) +
                         " out of range (n=" + std::to_string(n) + ")");
      }
      if (!seen.insert(q).second) {
        issues.push_back(where + ": duplicate operand q" + std::to_string(q));
      }
    }
    for (Qubit q : op.controls) {
      if (q >= n) {
        issues.push_back(where + ": control q" + std::to_string(q) +
                         " out of range (n=" + std::to_string(n) + ")");
      }
      if (!seen.insert(q).second) {
        issues.push_back(where + ": control overlaps another operand q" +
                         std::to_string(q));
      }
    }
  }
  return issues;
}

namespace {

std::string format_angle(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string emit_qasm(const Circuit& circuit) {
  std::string out;
  out += "OPENQASM 2.0;\n";
  out += "qreg q[" + std::to_string(circuit.num_qubits) + "];\n";
  bool has_measure = false;
  for (const GateOp& op : circuit.ops) {
    if (op.kind == GateKind::Measure) {
      has_measure = true;
    }
  }
  if (has_measure) {
    out += "creg c[" + std::to_string(circuit.num_qubits) + "];\n";
  }
  for (const GateOp& op : circuit.ops) {
    if (op.kind == GateKind::Barrier) {
      continue;  // dropped by the parser anyway
    }
    if (op.kind == GateKind::Measure) {
      for (Qubit q : op.targets) {
        out += "measure q[" + std::to_string(q) + "] -> c[" +
               std::to_string(q) + "];\n";
      }
      continue;
    }
    std::string line;
    // cp is the one controlled spelling the parser maps back to a
    // control-carrying single-qubit kind; CX/CZ/CCX carry their controls in
    // their own kind. Anything else with controls has no QASM 2.0 spelling.
    if (op.kind == GateKind::Phase && op.controls.size() == 1) {
      line = "cp";
    } else if (op.controls.empty() || op.kind == GateKind::CX ||
               op.kind == GateKind::CZ || op.kind == GateKind::CCX) {
      line = std::string(gate_name(op.kind));
    } else {
      throw std::invalid_argument(
          "emit_qasm: no OpenQASM 2.0 spelling for controlled " +
          std::string(gate_name(op.kind)));
    }
    if (!op.params.empty()) {
      line += "(";
      for (std::size_t i = 0; i < op.params.size(); ++i) {
        if (i != 0) line += ",";
        line += format_angle(op.params[i]);
      }
      line += ")";
    }
    line += " ";
    bool first = true;
    for (Qubit q : op.controls) {
      if (!first) line += ",";
      line += "q[" + std::to_string(q) + "]";
      first = false;
    }
    for (Qubit q : op.targets) {
      if (!first) line += ",";
      line += "q[" + std::to_string(q) + "]";
      first = false;
    }
    out += line + ";\n";
  }
  return out;
}

}  // namespace stochdd
