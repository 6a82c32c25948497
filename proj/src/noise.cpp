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

#include "stochdd/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochdd/errors.hpp"

namespace stochdd {

namespace {

void check_channel_args(const StateDD& state, Qubit qubit, double p) {
  if (qubit >= state.num_qubits()) {
    throw std::invalid_argument("noise channel: qubit out of range");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("noise channel: probability outside [0, 1]");
  }
}

}  // namespace

KrausPair damping_kraus(DDArena& arena, Qubit target, double p,
                        std::size_t n) {
  const double sp = std::sqrt(p);
  const double s1p = std::sqrt(1.0 - p);
  const Mat2 a0{ComplexValue{}, ComplexValue{sp, 0.0}, ComplexValue{},
                ComplexValue{}};
  const Mat2 a1{ComplexValue{1.0, 0.0}, ComplexValue{}, ComplexValue{},
                ComplexValue{s1p, 0.0}};
  return {arena.single_qubit_operator(a0, target, n),
          arena.single_qubit_operator(a1, target, n)};
}

ChannelOutcome apply_noise_site(const StateDD& state, const NoiseSite& site,
                                RandomStream& rng) {
  check_channel_args(state, site.qubit, site.probability);
  const double p = site.probability;
  if (p <= 0.0) {
    return {state, false};
  }
  DDArena& arena = state.arena();
  const std::size_t n = state.num_qubits();

  switch (site.channel) {
    case ChannelKind::Depolarizing: {
      if (rng.next_unit() >= p) {
        return {state, false};
      }
      const std::uint32_t which = rng.next_choice(4);
      if (which == 0) {
        return {state, true};  // the drawn Pauli is the identity
      }
      const GateKind kind = which == 1   ? GateKind::X
                            : which == 2 ? GateKind::Y
                                         : GateKind::Z;
      const MatrixDD pauli = arena.gate_matrix({kind, {}, {site.qubit}, {}}, n);
      return {apply_matrix(pauli, state), true};
    }
    case ChannelKind::PhaseFlip: {
      if (rng.next_unit() >= p) {
        return {state, false};
      }
      const MatrixDD z =
          arena.gate_matrix({GateKind::Z, {}, {site.qubit}, {}}, n);
      return {apply_matrix(z, state), true};
    }
    case ChannelKind::AmplitudeDamping: {
      const KrausPair kraus = damping_kraus(arena, site.qubit, p, n);
      const StateDD damped = apply_matrix(kraus.a0, state);
      double s0 = norm_squared(damped);
      if (s0 < -1e-9 || s0 > 1.0 + 1e-9) {
        throw NumericDegeneracyError(
            "amplitude damping: branch probability outside [0, 1]");
      }
      s0 = std::min(1.0, std::max(0.0, s0));
      if (rng.next_unit() < s0) {
        return {scale(damped, {1.0 / std::sqrt(s0), 0.0}), true};
      }
      const StateDD survived = apply_matrix(kraus.a1, state);
      return {scale(survived, {1.0 / std::sqrt(1.0 - s0), 0.0}), false};
    }
  }
  throw std::invalid_argument("noise channel: unknown channel kind");
}

StateDD apply_depolarizing(const StateDD& state, Qubit qubit, double p,
                           RandomStream& rng) {
  return apply_noise_site(state, {ChannelKind::Depolarizing, qubit, p}, rng)
      .state;
}

StateDD apply_phase_flip(const StateDD& state, Qubit qubit, double p,
                         RandomStream& rng) {
  return apply_noise_site(state, {ChannelKind::PhaseFlip, qubit, p}, rng)
      .state;
}

StateDD apply_amplitude_damping(const StateDD& state, Qubit qubit, double p,
                                RandomStream& rng) {
  return apply_noise_site(state, {ChannelKind::AmplitudeDamping, qubit, p},
                          rng)
      .state;
}

std::vector<NoiseSite> noise_sites_for_gate(const GateOp& gate,
                                            const NoiseSpec& spec,
                                            std::size_t num_qubits) {
  std::vector<NoiseSite> sites;
  if (gate.kind == GateKind::Measure || gate.kind == GateKind::Barrier) {
    return sites;
  }
  const std::vector<Qubit> operands = operand_qubits(gate);
  auto is_operand = [&operands](Qubit q) {
    return std::find(operands.begin(), operands.end(), q) != operands.end();
  };
  if (spec.policy == NoisePolicy::OperandsOnly) {
    for (Qubit q : operands) {
      if (spec.p_depol > 0.0)
        sites.push_back({ChannelKind::Depolarizing, q, spec.p_depol});
      if (spec.p_damp > 0.0)
        sites.push_back({ChannelKind::AmplitudeDamping, q, spec.p_damp});
      if (spec.p_flip > 0.0)
        sites.push_back({ChannelKind::PhaseFlip, q, spec.p_flip});
    }
  } else {
    for (Qubit q = 0; q < num_qubits; ++q) {
      if (spec.p_depol > 0.0 && is_operand(q))
        sites.push_back({ChannelKind::Depolarizing, q, spec.p_depol});
      if (spec.p_damp > 0.0)
        sites.push_back({ChannelKind::AmplitudeDamping, q, spec.p_damp});
      if (spec.p_flip > 0.0)
        sites.push_back({ChannelKind::PhaseFlip, q, spec.p_flip});
    }
  }
  return sites;
}

StateDD insert_noise(const StateDD& state, const GateOp& gate,
                     const NoiseSpec& spec, RandomStream& rng) {
  StateDD current = state;
  for (const NoiseSite& site :
       noise_sites_for_gate(gate, spec, state.num_qubits())) {
    current = apply_noise_site(current, site, rng).state;
  }
  return current;
}

Schedule build_schedule(const Circuit& circuit, const NoiseSpec& spec) {
  Schedule schedule;
  for (const GateOp& op : circuit.ops) {
    if (op.kind == GateKind::Barrier || op.kind == GateKind::Measure) {
      continue;
    }
    schedule.emplace_back(op);
    for (const NoiseSite& site :
         noise_sites_for_gate(op, spec, circuit.num_qubits)) {
      schedule.emplace_back(site);
    }
  }
  return schedule;
}

}  // namespace stochdd
