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

#include <complex>
#include <functional>
#include <vector>

#include "stochdd/circuit.hpp"
#include "stochdd/noise.hpp"

namespace stochdd {

/// Dense statevector reference simulator for small qubit counts. This is the
/// brute-force oracle the decision-diagram engine is tested against; it
/// shares no code with the DD path (std::complex arithmetic, bit-indexed
/// updates).
struct DenseState {
  std::vector<std::complex<double>> amplitudes;
  std::size_t num_qubits = 0;
};

DenseState dense_zero_state(std::size_t n);
DenseState dense_basis_state(std::size_t n, std::string_view bits);

/// Exact matrix-vector product of the embedded gate; n capped at 20.
/// Measure is rejected (non-unitary); Barrier is a no-op.
DenseState dense_apply(const GateOp& gate, const DenseState& state);

/// Applies every non-measure gate of the circuit to |0...0>.
DenseState dense_run(const Circuit& circuit);

double dense_norm_squared(const DenseState& state);

/// Enumerates every noise-branch combination of a schedule with its exact
/// probability and invokes fn(probability, final state). Channel semantics
/// mirror the sampler's draws branch for branch: depolarizing expands into
/// no-error plus four p/4 Pauli branches, damping into its two
/// state-dependent branches, phase flip into two branches. Zero-probability
/// branches are pruned. Throws ResourceLimitError past `branch_cap` visited
/// branches.
void enumerate_channel_branches(
    const Schedule& schedule, std::size_t n, std::size_t branch_cap,
    const std::function<void(double, const DenseState&)>& fn);

/// Exact outcome distribution over all 2^n basis states.
std::vector<double> dense_channel_average(const Schedule& schedule,
                                          std::size_t n,
                                          std::size_t branch_cap = 10'000'000);
std::vector<double> dense_channel_average(const Circuit& circuit,
                                          const NoiseSpec& spec,
                                          std::size_t branch_cap = 10'000'000);

}  // namespace stochdd
