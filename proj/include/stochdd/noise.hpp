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

#include <cstdint>
#include <variant>
#include <vector>

#include "stochdd/circuit.hpp"
#include "stochdd/dd.hpp"
#include "stochdd/rng.hpp"

namespace stochdd {

/// Where decoherence channels fire relative to each executed gate.
/// OperandsOnly: every channel fires on the gate's operand qubits.
/// AllQubitsPerStep: depolarizing stays on operand qubits; damping and phase
/// flip additionally fire on every qubit of the register after each gate.
enum class NoisePolicy {
  OperandsOnly,
  AllQubitsPerStep,
};

struct NoiseSpec {
  double p_depol = 0.0;
  double p_damp = 0.0;
  double p_flip = 0.0;
  NoisePolicy policy = NoisePolicy::OperandsOnly;
  std::uint64_t rng_seed = 0;
};

enum class ChannelKind {
  Depolarizing,
  AmplitudeDamping,
  PhaseFlip,
};

/// One channel application site in a simulation schedule.
struct NoiseSite {
  ChannelKind channel = ChannelKind::Depolarizing;
  Qubit qubit = 0;
  double probability = 0.0;

  bool operator==(const NoiseSite&) const = default;
};

/// A schedule interleaves unitary gates with explicit channel sites. The
/// stochastic sampler and the exhaustive dense oracle both execute schedules,
/// so their channel semantics coincide by construction. Tests can craft
/// schedules directly (e.g. a single channel after state preparation).
using ScheduleStep = std::variant<GateOp, NoiseSite>;
using Schedule = std::vector<ScheduleStep>;

/// Expands a circuit into a schedule under the spec's insertion policy:
/// after every executed gate, for each affected qubit in ascending order,
/// depolarizing then amplitude damping then phase flip (sites with zero
/// probability are omitted). Measure ops terminate execution (they are
/// trailing by validation) and Barrier never reaches schedules.
Schedule build_schedule(const Circuit& circuit, const NoiseSpec& spec);

/// Amplitude-damping Kraus factors embedded at `target`:
///   a0 = [[0, sqrt(p)], [0, 0]],  a1 = [[1, 0], [0, sqrt(1-p)]].
/// Satisfies a0^T* a0 + a1^T* a1 = I.
struct KrausPair {
  MatrixDD a0;
  MatrixDD a1;
};
KrausPair damping_kraus(DDArena& arena, Qubit target, double p, std::size_t n);

// Channel applications. Each consumes random draws in a fixed documented
// order (see RandomStream): a channel with p <= 0 returns the state unchanged
// and consumes nothing.
//
// Depolarizing: one uniform draw; on fire (u < p) one 4-way choice among
// I/X/Y/Z which is then applied.
// Amplitude damping: computes s0 = ||a0 psi||^2, one uniform draw, then
// returns the chosen branch renormalized. Throws NumericDegeneracyError when
// s0 leaves [-1e-9, 1 + 1e-9]; otherwise s0 is clamped to [0, 1].
// Phase flip: one uniform draw; on fire applies Z.
StateDD apply_depolarizing(const StateDD& state, Qubit qubit, double p,
                           RandomStream& rng);
StateDD apply_phase_flip(const StateDD& state, Qubit qubit, double p,
                         RandomStream& rng);
StateDD apply_amplitude_damping(const StateDD& state, Qubit qubit, double p,
                                RandomStream& rng);

/// Channel application reporting whether an error event fired (depolarizing
/// Bernoulli success, phase-flip Bernoulli success, or damping decay branch).
struct ChannelOutcome {
  StateDD state;
  bool error_event = false;
};
ChannelOutcome apply_noise_site(const StateDD& state, const NoiseSite& site,
                                RandomStream& rng);

/// All channels for one executed gate per the spec's policy and fixed order.
StateDD insert_noise(const StateDD& state, const GateOp& gate,
                     const NoiseSpec& spec, RandomStream& rng);

/// The channel sites insert_noise would apply for one gate.
std::vector<NoiseSite> noise_sites_for_gate(const GateOp& gate,
                                            const NoiseSpec& spec,
                                            std::size_t num_qubits);

}  // namespace stochdd
