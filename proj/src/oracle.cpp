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

#include "stochdd/oracle.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "stochdd/errors.hpp"

namespace stochdd {

namespace {

using C = std::complex<double>;

constexpr std::size_t kMaxDenseQubits = 20;

void check_size(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("dense state: qubit count must be >= 1");
  }
  if (n > kMaxDenseQubits) {
    throw ResourceLimitError("dense state: more than 20 qubits");
  }
}

// Bit position of qubit q in a basis-state index (q0 is most significant).
std::size_t bit_of(std::size_t n, Qubit q) { return n - 1 - q; }

std::array<C, 4> dense_gate_matrix2(GateKind kind,
                                    std::span<const double> params) {
  const C i{0.0, 1.0};
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case GateKind::I:
      return {1, 0, 0, 1};
    case GateKind::X:
    case GateKind::CX:
    case GateKind::CCX:
      return {0, 1, 1, 0};
    case GateKind::Y:
      return {0, -i, i, 0};
    case GateKind::Z:
    case GateKind::CZ:
      return {1, 0, 0, -1};
    case GateKind::H:
      return {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
    case GateKind::S:
      return {1, 0, 0, i};
    case GateKind::Sdg:
      return {1, 0, 0, -i};
    case GateKind::T:
      return {1, 0, 0, std::exp(i * (std::numbers::pi / 4))};
    case GateKind::Tdg:
      return {1, 0, 0, std::exp(-i * (std::numbers::pi / 4))};
    case GateKind::RX: {
      const double h = params[0] / 2;
      return {std::cos(h), -i * std::sin(h), -i * std::sin(h), std::cos(h)};
    }
    case GateKind::RY: {
      const double h = params[0] / 2;
      return {std::cos(h), -std::sin(h), std::sin(h), std::cos(h)};
    }
    case GateKind::RZ: {
      const double h = params[0] / 2;
      return {std::exp(-i * h), 0, 0, std::exp(i * h)};
    }
    case GateKind::Phase:
      return {1, 0, 0, std::exp(i * params[0])};
    case GateKind::U3: {
      const double h = params[0] / 2, phi = params[1], lam = params[2];
      return {std::cos(h), -std::exp(i * lam) * std::sin(h),
              std::exp(i * phi) * std::sin(h),
              std::exp(i * (phi + lam)) * std::cos(h)};
    }
    default:
      throw UnsupportedGateError("dense_apply: gate has no matrix: " +
                                 std::string(gate_name(kind)));
  }
}

void apply_mat2_in_place(DenseState& state, Qubit target,
                         const std::array<C, 4>& u,
                         const std::vector<Qubit>& controls) {
  const std::size_t n = state.num_qubits;
  const std::size_t tbit = bit_of(n, target);
  const std::size_t tmask = std::size_t{1} << tbit;
  std::size_t cmask = 0;
  for (Qubit c : controls) {
    cmask |= std::size_t{1} << bit_of(n, c);
  }
  const std::size_t dim = state.amplitudes.size();
  for (std::size_t idx = 0; idx < dim; ++idx) {
    if ((idx & tmask) != 0 || (idx & cmask) != cmask) continue;
    const std::size_t j = idx | tmask;
    const C a0 = state.amplitudes[idx];
    const C a1 = state.amplitudes[j];
    state.amplitudes[idx] = u[0] * a0 + u[1] * a1;
    state.amplitudes[j] = u[2] * a0 + u[3] * a1;
  }
}

void apply_gate_in_place(DenseState& state, const GateOp& gate) {
  const std::size_t n = state.num_qubits;
  if (gate.kind == GateKind::Barrier) {
    return;
  }
  if (gate.kind == GateKind::Measure) {
    throw UnsupportedGateError("dense_apply: measure is not a unitary");
  }
  for (Qubit q : gate.targets) {
    if (q >= n) throw std::invalid_argument("dense_apply: target out of range");
  }
  for (Qubit q : gate.controls) {
    if (q >= n) throw std::invalid_argument("dense_apply: control out of range");
  }
  if (gate.kind == GateKind::Swap) {
    const std::size_t abit = bit_of(n, gate.targets[0]);
    const std::size_t bbit = bit_of(n, gate.targets[1]);
    std::size_t cmask = 0;
    for (Qubit c : gate.controls) cmask |= std::size_t{1} << bit_of(n, c);
    for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx) {
      if ((idx & cmask) != cmask) continue;
      const bool a = (idx >> abit) & 1, b = (idx >> bbit) & 1;
      if (a == b) continue;
      const std::size_t j =
          (idx ^ (std::size_t{1} << abit)) ^ (std::size_t{1} << bbit);
      if (idx < j) std::swap(state.amplitudes[idx], state.amplitudes[j]);
    }
    return;
  }
  apply_mat2_in_place(state, gate.targets[0],
                      dense_gate_matrix2(gate.kind, gate.params),
                      gate.controls);
}

}  // namespace

DenseState dense_zero_state(std::size_t n) {
  check_size(n);
  DenseState s;
  s.num_qubits = n;
  s.amplitudes.assign(std::size_t{1} << n, C{});
  s.amplitudes[0] = 1.0;
  return s;
}

DenseState dense_basis_state(std::size_t n, std::string_view bits) {
  check_size(n);
  if (bits.size() != n) {
    throw std::invalid_argument("dense_basis_state: bitstring length mismatch");
  }
  std::size_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("dense_basis_state: bitstring must be 0/1");
    }
    index = (index << 1) | static_cast<std::size_t>(c - '0');
  }
  DenseState s;
  s.num_qubits = n;
  s.amplitudes.assign(std::size_t{1} << n, C{});
  s.amplitudes[index] = 1.0;
  return s;
}

DenseState dense_apply(const GateOp& gate, const DenseState& state) {
  check_size(state.num_qubits);
  DenseState out = state;
  apply_gate_in_place(out, gate);
  return out;
}

DenseState dense_run(const Circuit& circuit) {
  DenseState state = dense_zero_state(circuit.num_qubits);
  for (const GateOp& op : circuit.ops) {
    if (op.kind == GateKind::Measure) continue;
    apply_gate_in_place(state, op);
  }
  return state;
}

double dense_norm_squared(const DenseState& state) {
  double sum = 0.0;
  for (const C& a : state.amplitudes) sum += std::norm(a);
  return sum;
}

namespace {

struct BranchEnumerator {
  std::size_t n;
  std::size_t branch_cap;
  std::size_t visited = 0;
  const Schedule* schedule;
  const std::function<void(double, const DenseState&)>* fn;

  void bump() {
    if (++visited > branch_cap) {
      throw ResourceLimitError(
          "dense_channel_average: branch enumeration cap exceeded");
    }
  }

  void walk(DenseState state, double prob, std::size_t step) {
    while (step < schedule->size()) {
      const ScheduleStep& s = (*schedule)[step];
      if (const GateOp* gate = std::get_if<GateOp>(&s)) {
        apply_gate_in_place(state, *gate);
        ++step;
        continue;
      }
      const NoiseSite& site = std::get<NoiseSite>(s);
      const double p = site.probability;
      if (p <= 0.0) {
        ++step;
        continue;
      }
      switch (site.channel) {
        case ChannelKind::Depolarizing: {
          // Five branches mirroring the sampler's two-stage draw: no-error,
          // then I/X/Y/Z inside the error event.
          if (1.0 - p > 0.0) {
            bump();
            walk(state, prob * (1.0 - p), step + 1);
          }
          for (GateKind k :
               {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z}) {
            bump();
            DenseState branch = state;
            apply_gate_in_place(branch, {k, {}, {site.qubit}, {}});
            walk(std::move(branch), prob * (p / 4.0), step + 1);
          }
          return;
        }
        case ChannelKind::PhaseFlip: {
          if (1.0 - p > 0.0) {
            bump();
            walk(state, prob * (1.0 - p), step + 1);
          }
          bump();
          DenseState branch = state;
          apply_gate_in_place(branch, {GateKind::Z, {}, {site.qubit}, {}});
          walk(std::move(branch), prob * p, step + 1);
          return;
        }
        case ChannelKind::AmplitudeDamping: {
          const double sp = std::sqrt(p);
          const double s1p = std::sqrt(1.0 - p);
          DenseState damped = state;
          apply_mat2_in_place(damped, site.qubit, {0, sp, 0, 0}, {});
          const double s0 = dense_norm_squared(damped);
          if (s0 > 0.0) {
            bump();
            const double inv = 1.0 / std::sqrt(s0);
            for (C& a : damped.amplitudes) a *= inv;
            walk(std::move(damped), prob * s0, step + 1);
          }
          if (1.0 - s0 > 0.0) {
            bump();
            DenseState survived = state;
            apply_mat2_in_place(survived, site.qubit, {1, 0, 0, s1p}, {});
            const double inv = 1.0 / std::sqrt(1.0 - s0);
            for (C& a : survived.amplitudes) a *= inv;
            walk(std::move(survived), prob * (1.0 - s0), step + 1);
          }
          return;
        }
      }
      throw std::invalid_argument("unknown channel kind");
    }
    (*fn)(prob, state);
  }
};

}  // namespace

void enumerate_channel_branches(
    const Schedule& schedule, std::size_t n, std::size_t branch_cap,
    const std::function<void(double, const DenseState&)>& fn) {
  check_size(n);
  BranchEnumerator e{n, branch_cap, 0, &schedule, &fn};
  e.walk(dense_zero_state(n), 1.0, 0);
}

std::vector<double> dense_channel_average(const Schedule& schedule,
                                          std::size_t n,
                                          std::size_t branch_cap) {
  std::vector<double> distribution(std::size_t{1} << n, 0.0);
  enumerate_channel_branches(
      schedule, n, branch_cap,
      [&distribution](double prob, const DenseState& state) {
        for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
          distribution[i] += prob * std::norm(state.amplitudes[i]);
        }
      });
  return distribution;
}

std::vector<double> dense_channel_average(const Circuit& circuit,
                                          const NoiseSpec& spec,
                                          std::size_t branch_cap) {
  return dense_channel_average(build_schedule(circuit, spec),
                               circuit.num_qubits, branch_cap);
}

}  // namespace stochdd
