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

#include <array>
#include <map>
#include <sstream>

#include "doctest.h"
#include "stochdd/circuit.hpp"
#include "stochdd/dd.hpp"
#include "stochdd/errors.hpp"
#include "stochdd/noise.hpp"
#include "stochdd/oracle.hpp"
#include "stochdd/rng.hpp"
#include "test_helpers.hpp"

using namespace stochdd;
using namespace stochdd::testing;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

StateDD make_bell(DDArena& arena) {
  StateDD psi = arena.make_basis_state(2, "00");
  psi = apply_matrix(arena.gate_matrix({GateKind::H, {}, {0}, {}}, 2), psi);
  psi = apply_matrix(arena.gate_matrix({GateKind::CX, {}, {1}, {0}}, 2), psi);
  return psi;
}

}  // namespace

TEST_SUITE_BEGIN("dd_core");

TEST_CASE("value table uniquing is idempotent and tolerance-merging") {
  ValueTable table;
  const double a = table.canon(0.5);
  CHECK(table.canon(0.5) == a);
  CHECK(table.canon(0.5 + 4e-14) == a);   // within tolerance: same entry
  CHECK(table.canon(0.5 + 4e-14) == a);   // idempotent
  CHECK(table.canon(0.5 + 1e-12) != a);   // beyond tolerance: new entry
  CHECK(table.canon(3e-14) == 0.0);       // collapses to exact zero
  CHECK(table.canon(1.0 + 5e-14) == 1.0); // unit is pre-seeded
  CHECK(table.canon(-1.0 - 5e-14) == -1.0);
}

TEST_CASE("make_basis_state matches definitions") {
  DDArena arena;
  SUBCASE("two qubits |00>") {
    StateDD s = arena.make_basis_state(2, "00");
    const auto amps = to_amplitudes(s);
    CHECK(amps[0] == ComplexValue{1.0, 0.0});
    CHECK(amps[1].exactly_zero());
    CHECK(amps[2].exactly_zero());
    CHECK(amps[3].exactly_zero());
    CHECK(node_count(s) == 2);
  }
  SUBCASE("one qubit |1>") {
    StateDD s = arena.make_basis_state(1, "1");
    const auto amps = to_amplitudes(s);
    CHECK(amps[0].exactly_zero());
    CHECK(amps[1] == ComplexValue{1.0, 0.0});
  }
  SUBCASE("q0 is the most significant bit") {
    StateDD s = arena.make_basis_state(3, "101");
    const auto amps = to_amplitudes(s);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(amps[i].mag2() == (i == 5 ? 1.0 : 0.0));
    }
    CHECK(node_count(s) == 3);
  }
  SUBCASE("zero qubits rejected") {
    CHECK_THROWS_AS(arena.make_basis_state(0, ""), std::invalid_argument);
  }
  SUBCASE("length mismatch rejected") {
    CHECK_THROWS_AS(arena.make_basis_state(3, "01"), std::invalid_argument);
  }
}

TEST_CASE("amplitude walks edge-weight products") {
  DDArena arena;
  StateDD bell = make_bell(arena);
  CHECK(amplitude(bell, "11").re == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  CHECK(amplitude(bell, "11").im == 0.0);
  CHECK(amplitude(bell, "01").exactly_zero());
  CHECK(amplitude(bell, "00") == amplitude(bell, "11"));
  CHECK_THROWS_AS(amplitude(bell, "0"), std::invalid_argument);

  // Normalization across all paths.
  std::mt19937_64 rng(11);
  const auto amps = random_amplitudes(4, rng);
  StateDD s = arena.make_state_from_amplitudes(amps);
  double total = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    total += amplitude(s, bits_of_index(i, 4)).mag2();
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gate_matrix encodes the expected operators") {
  DDArena arena;
  SUBCASE("Z on q0 of a 2-qubit register is diag(1,1,-1,-1)") {
    MatrixDD z = arena.gate_matrix({GateKind::Z, {}, {0}, {}}, 2);
    const auto m = to_dense_matrix(z);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        const double expected = r != c ? 0.0 : (r < 2 ? 1.0 : -1.0);
        CHECK(m[r][c].re == expected);
        CHECK(m[r][c].im == 0.0);
      }
    }
    // One node per level: the diagonal structure shares everything.
    CHECK(node_count(z) == 2);
  }
  SUBCASE("X is the NOT matrix") {
    MatrixDD x = arena.gate_matrix({GateKind::X, {}, {0}, {}}, 1);
    const auto m = to_dense_matrix(x);
    CHECK(m[0][0].exactly_zero());
    CHECK(m[0][1] == ComplexValue{1.0, 0.0});
    CHECK(m[1][0] == ComplexValue{1.0, 0.0});
    CHECK(m[1][1].exactly_zero());
  }
  SUBCASE("CNOT with control q0, target q1") {
    MatrixDD cx = arena.gate_matrix({GateKind::CX, {}, {1}, {0}}, 2);
    const auto m = to_dense_matrix(cx);
    const std::array<std::array<double, 4>, 4> expected{
        {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}};
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        CHECK(m[r][c].re == expected[r][c]);
        CHECK(m[r][c].im == 0.0);
      }
    }
  }
  SUBCASE("overlapping control and target rejected") {
    CHECK_THROWS_AS(arena.gate_matrix({GateKind::CX, {}, {0}, {0}}, 2),
                    std::invalid_argument);
  }
  SUBCASE("measure has no matrix") {
    CHECK_THROWS_AS(arena.gate_matrix({GateKind::Measure, {}, {0}, {}}, 1),
                    UnsupportedGateError);
  }
}

TEST_CASE("gate constructors are unitary") {
  DDArena arena;
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3;
    const GateOp op = random_gate(n, rng);
    MatrixDD u = arena.gate_matrix(op, n);
    const auto m = to_dense_matrix(u);
    const std::size_t dim = 8;
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        std::complex<double> entry = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          entry += m[r][k].to_std() * std::conj(m[c][k].to_std());
        }
        CHECK(std::abs(entry - (r == c ? 1.0 : 0.0)) < 1e-10);
      }
    }
  }
}

TEST_CASE("apply_matrix: CNOT fixture and identity canonicity") {
  DDArena arena;
  const std::vector<ComplexValue> input{
      {kInvSqrt2, 0.0}, {}, {kInvSqrt2, 0.0}, {}};
  StateDD psi = arena.make_state_from_amplitudes(input);
  MatrixDD cx = arena.gate_matrix({GateKind::CX, {}, {1}, {0}}, 2);
  StateDD out = apply_matrix(cx, psi);

  const auto amps = to_amplitudes(out);
  CHECK(amps[0] == amplitude(psi, "00"));  // canonical-value-level equality
  CHECK(amps[1].exactly_zero());
  CHECK(amps[2].exactly_zero());
  CHECK(amps[3] == amps[0]);

  MatrixDD id = arena.identity(2);
  StateDD same = apply_matrix(id, out);
  CHECK(same.same_root(out));

  StateDD one_qubit = arena.make_basis_state(1, "0");
  CHECK_THROWS_AS(apply_matrix(cx, one_qubit), std::invalid_argument);
}

TEST_CASE("apply_matrix matches the dense oracle on random 6-qubit cases") {
  DDArena arena;
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 6;
    const auto amps = random_amplitudes(n, rng);
    const GateOp op = random_gate(n, rng);

    StateDD state = arena.make_state_from_amplitudes(amps);
    StateDD result = apply_matrix(arena.gate_matrix(op, n), state);
    const DenseState expected = dense_apply(op, dense_from_values(amps, n));
    CHECK(max_amplitude_diff(result, expected) < 1e-10);
  }
}

TEST_CASE("add is elementwise sum") {
  DDArena arena;
  std::mt19937_64 rng(41);
  SUBCASE("adding the zero state returns the operand verbatim") {
    StateDD psi = make_bell(arena);
    StateDD zero = scale(psi, {});
    CHECK(zero.is_zero());
    CHECK(add(psi, zero).same_root(psi));
    CHECK(add(zero, psi).same_root(psi));
  }
  SUBCASE("psi + (-1) psi cancels to the zero edge") {
    StateDD psi = make_bell(arena);
    StateDD neg = scale(psi, {-1.0, 0.0});
    CHECK(add(psi, neg).is_zero());
  }
  SUBCASE("random pairs match the dense sum") {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 5;
      const auto a = random_amplitudes(n, rng);
      const auto b = random_amplitudes(n, rng);
      StateDD sum = add(arena.make_state_from_amplitudes(a),
                        arena.make_state_from_amplitudes(b));
      DenseState expected = dense_from_values(a, n);
      for (std::size_t i = 0; i < expected.amplitudes.size(); ++i) {
        expected.amplitudes[i] += b[i].to_std();
      }
      CHECK(max_amplitude_diff(sum, expected) < 1e-10);
    }
  }
}

TEST_CASE("norm_squared") {
  DDArena arena;
  StateDD bell = make_bell(arena);
  CHECK(norm_squared(bell) == doctest::Approx(1.0).epsilon(1e-10));

  // Applying the damping Kraus factor a0 with p = 0.2 leaves mass p/2.
  KrausPair kraus = damping_kraus(arena, 0, 0.2, 2);
  StateDD damped = apply_matrix(kraus.a0, bell);
  CHECK(norm_squared(damped) == doctest::Approx(0.1).epsilon(1e-12));

  std::mt19937_64 rng(43);
  auto amps = random_amplitudes(4, rng);
  for (auto& a : amps) a = a * 1.7;  // deliberately unnormalized
  StateDD s = arena.make_state_from_amplitudes(amps);
  double expected = 0.0;
  for (const auto& a : amps) expected += a.mag2();
  CHECK(norm_squared(s) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("scale") {
  DDArena arena;
  StateDD bell = make_bell(arena);
  CHECK(scale(bell, {1.0, 0.0}).same_root(bell));
  CHECK(scale(bell, {}).is_zero());

  StateDD stretched = scale(bell, {1.3, -0.4});
  const double ns = norm_squared(stretched);
  StateDD renormalized = scale(stretched, {1.0 / std::sqrt(ns), 0.0});
  CHECK(norm_squared(renormalized) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("inner_product") {
  DDArena arena;
  StateDD bell = make_bell(arena);
  const ComplexValue self = inner_product(bell, bell);
  CHECK(self.re == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(self.im == 0.0);

  StateDD zz = arena.make_basis_state(2, "00");
  CHECK(inner_product(zz, bell).re ==
        doctest::Approx(kInvSqrt2).epsilon(1e-12));

  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5;
    const auto a = random_amplitudes(n, rng);
    const auto b = random_amplitudes(n, rng);
    const ComplexValue got = inner_product(arena.make_state_from_amplitudes(a),
                                           arena.make_state_from_amplitudes(b));
    std::complex<double> expected = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      expected += std::conj(a[i].to_std()) * b[i].to_std();
    }
    CHECK(std::abs(got.to_std() - expected) < 1e-10);
  }

  StateDD three = arena.make_basis_state(3, "000");
  CHECK_THROWS_AS(inner_product(bell, three), std::invalid_argument);
}

TEST_CASE("measure_all") {
  DDArena arena;
  RandomStream rng(99);
  SUBCASE("basis states are deterministic") {
    StateDD s = arena.make_basis_state(3, "101");
    for (int i = 0; i < 20; ++i) {
      CHECK(measure_all(s, rng) == "101");
    }
  }
  SUBCASE("Bell yields only 00 and 11") {
    StateDD bell = make_bell(arena);
    std::size_t zeros = 0;
    for (int i = 0; i < 4000; ++i) {
      const std::string bits = measure_all(bell, rng);
      const bool valid = bits == "00" || bits == "11";
      CHECK(valid);
      zeros += bits == "00";
    }
    // 3 sigma around 2000 for p = 1/2.
    CHECK(std::abs(static_cast<double>(zeros) - 2000.0) < 3 * std::sqrt(1000.0));
  }
  SUBCASE("empirical histogram matches |amplitude|^2 on a random state") {
    std::mt19937_64 gen(53);
    const std::size_t n = 3;
    const auto amps = random_amplitudes(n, gen);
    StateDD s = arena.make_state_from_amplitudes(amps);
    const std::size_t draws = 1'000'000;
    std::array<std::size_t, 8> counts{};
    for (std::size_t i = 0; i < draws; ++i) {
      const std::string bits = measure_all(s, rng);
      std::size_t index = 0;
      for (char c : bits) index = (index << 1) | (c == '1');
      ++counts[index];
    }
    for (std::size_t i = 0; i < 8; ++i) {
      const double p = amps[i].mag2();
      const double sigma = std::sqrt(p * (1.0 - p) * draws);
      CHECK(std::abs(static_cast<double>(counts[i]) - p * draws) <=
            3.0 * sigma + 1.0);
    }
  }
  SUBCASE("unnormalized states are rejected") {
    StateDD stretched = scale(arena.make_basis_state(2, "00"), {1.5, 0.0});
    CHECK_THROWS_AS(measure_all(stretched, rng), NumericDegeneracyError);
  }
}

TEST_CASE("canonicity: construction order does not matter") {
  DDArena arena;
  std::mt19937_64 rng(59);
  const std::size_t n = 4;
  const auto amps = random_amplitudes(n, rng);

  StateDD direct = arena.make_state_from_amplitudes(amps);

  // Same vector assembled as a sum of scaled basis states, in two different
  // permutations.
  auto assemble = [&](bool reversed) {
    StateDD acc = scale(arena.make_basis_state(n, std::string(n, '0')), {});
    for (std::size_t k = 0; k < amps.size(); ++k) {
      const std::size_t i = reversed ? amps.size() - 1 - k : k;
      StateDD basis = arena.make_basis_state(n, bits_of_index(i, n));
      acc = add(acc, scale(basis, amps[i]));
    }
    return acc;
  };
  StateDD forward = assemble(false);
  StateDD backward = assemble(true);
  CHECK(forward.same_root(backward));
  CHECK(max_amplitude_diff(forward, dense_from_values(amps, n)) < 1e-10);
  // The directly built state agrees with the sums at the canonical level.
  CHECK(direct.same_root(forward));
}

TEST_CASE("reconstruction agrees with dense expansion for random diagrams") {
  DDArena arena;
  std::mt19937_64 rng(61);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto amps = random_amplitudes(n, rng);
    StateDD s = arena.make_state_from_amplitudes(amps);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      CHECK(std::abs(amplitude(s, bits_of_index(i, n)).to_std() -
                     amps[i].to_std()) < 1e-10);
    }
  }
}

TEST_CASE("normalization invariant holds after public operations") {
  DDArena arena;
  std::mt19937_64 rng(67);
  auto check_invariant = [](const StateDD& s) {
    for_each_node(s, [](const VecNode& node) {
      bool has_unit = false;
      for (const VecEdge& e : node.succ) {
        if (e.w.exactly_one()) has_unit = true;
        CHECK(e.w.mag2() <= 1.0 + 1e-12);
        if (e.w.exactly_zero()) CHECK(e.node == nullptr);
        if (!e.is_zero() && node.level > 1) {
          CHECK(e.node != nullptr);
          CHECK(e.node->level == node.level - 1);
        }
      }
      CHECK(has_unit);
    });
  };
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 5;
    StateDD s = arena.make_state_from_amplitudes(random_amplitudes(n, rng));
    check_invariant(s);
    const GateOp op = random_gate(n, rng);
    s = apply_matrix(arena.gate_matrix(op, n), s);
    check_invariant(s);
    s = add(s, arena.make_state_from_amplitudes(random_amplitudes(n, rng)));
    check_invariant(s);
  }
}

TEST_CASE("compactness: basis states take n nodes, GHZ takes 2n-1") {
  // GHZ has Schmidt rank 2 across every cut, so its canonical diagram needs
  // two nodes per level below the root: 2n-1 total, matching the 3-node
  // 2-qubit picture. A basis state is a single chain of n nodes.
  DDArena arena;
  for (std::size_t n : {2, 8, 32, 128}) {
    StateDD zeros = arena.make_basis_state(n, std::string(n, '0'));
    CHECK(node_count(zeros) == n);

    StateDD ghz = zeros;
    ghz = apply_matrix(arena.gate_matrix({GateKind::H, {}, {0}, {}}, n), ghz);
    for (Qubit q = 0; q + 1 < n; ++q) {
      ghz = apply_matrix(
          arena.gate_matrix({GateKind::CX, {}, {q + 1}, {q}}, n), ghz);
    }
    CHECK(node_count(ghz) == 2 * n - 1);
    CHECK(norm_squared(ghz) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("memoization soundness: compute tables do not change results") {
  DDArena arena;
  std::mt19937_64 rng(71);
  const std::size_t n = 5;
  const auto amps = random_amplitudes(n, rng);
  const GateOp op = random_gate(n, rng);

  StateDD state = arena.make_state_from_amplitudes(amps);
  MatrixDD gate = arena.gate_matrix(op, n);

  StateDD with_tables = apply_matrix(gate, state);
  arena.clear_compute_tables();
  arena.set_compute_tables_enabled(false);
  StateDD without_tables = apply_matrix(gate, state);
  arena.set_compute_tables_enabled(true);

  // Bit-for-bit identical at the canonical-value-table level.
  CHECK(with_tables.same_root(without_tables));
}

TEST_CASE("garbage collection keeps pinned roots intact") {
  DDArena arena;
  StateDD keeper = make_bell(arena);
  const auto before = to_amplitudes(keeper);
  {
    std::mt19937_64 rng(73);
    for (int i = 0; i < 50; ++i) {
      StateDD garbage =
          arena.make_state_from_amplitudes(random_amplitudes(6, rng));
    }
  }
  const std::size_t live_before = arena.live_vec_nodes();
  arena.collect_garbage();
  CHECK(arena.live_vec_nodes() < live_before);
  CHECK(arena.live_vec_nodes() >= node_count(keeper));
  const auto after = to_amplitudes(keeper);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i] == after[i]);
  }
}

TEST_CASE("graphviz dump mentions every level") {
  DDArena arena;
  StateDD bell = make_bell(arena);
  std::ostringstream os;
  write_dot(bell, os);
  const std::string dot = os.str();
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("q0") != std::string::npos);
  CHECK(dot.find("q1") != std::string::npos);

  std::ostringstream om;
  write_dot(arena.gate_matrix({GateKind::Z, {}, {0}, {}}, 2), om);
  CHECK(om.str().find("digraph") != std::string::npos);
}

TEST_SUITE_END();
