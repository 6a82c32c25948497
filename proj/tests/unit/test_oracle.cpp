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

#include <complex>
#include <vector>

#include "doctest.h"
#include "stochdd/errors.hpp"
#include "stochdd/noise.hpp"
#include "stochdd/oracle.hpp"
#include "stochdd/sampler.hpp"
#include "test_helpers.hpp"

using namespace stochdd;
using namespace stochdd::testing;

namespace {

Schedule bell_then(const NoiseSite& site) {
  Schedule s;
  s.emplace_back(GateOp{GateKind::H, {}, {0}, {}});
  s.emplace_back(GateOp{GateKind::CX, {}, {1}, {0}});
  s.emplace_back(site);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("dense_apply basics") {
  SUBCASE("CNOT on the Example state") {
    DenseState s;
    s.num_qubits = 2;
    const double x = 1.0 / std::sqrt(2.0);
    s.amplitudes = {x, 0.0, x, 0.0};
    const DenseState out = dense_apply({GateKind::CX, {}, {1}, {0}}, s);
    CHECK(std::abs(out.amplitudes[0] - x) < 1e-15);
    CHECK(std::abs(out.amplitudes[1]) == 0.0);
    CHECK(std::abs(out.amplitudes[2]) == 0.0);
    CHECK(std::abs(out.amplitudes[3] - x) < 1e-15);
  }
  SUBCASE("X flips |0>") {
    const DenseState out =
        dense_apply({GateKind::X, {}, {0}, {}}, dense_zero_state(1));
    CHECK(std::abs(out.amplitudes[0]) == 0.0);
    CHECK(std::abs(out.amplitudes[1] - 1.0) == 0.0);
  }
  SUBCASE("resource guard") {
    CHECK_THROWS_AS(dense_zero_state(21), ResourceLimitError);
  }
  SUBCASE("measure rejected") {
    CHECK_THROWS_AS(dense_apply({GateKind::Measure, {}, {0}, {}},
                                dense_zero_state(1)),
                    UnsupportedGateError);
  }
}

TEST_CASE("composition equals the product of embedded gate matrices") {
  std::mt19937_64 rng(17);
  const std::size_t n = 3;
  const std::size_t dim = 8;
  const Circuit circuit = random_circuit(n, 6, rng);

  // Build each gate's full matrix column by column via dense_apply, multiply
  // the matrices, and compare against applying the circuit step by step.
  std::vector<std::vector<std::complex<double>>> product(
      dim, std::vector<std::complex<double>>(dim, 0.0));
  for (std::size_t c = 0; c < dim; ++c) product[c][c] = 1.0;

  for (const GateOp& op : circuit.ops) {
    std::vector<std::vector<std::complex<double>>> gate(
        dim, std::vector<std::complex<double>>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
      const DenseState image =
          dense_apply(op, dense_basis_state(n, bits_of_index(col, n)));
      for (std::size_t row = 0; row < dim; ++row) {
        gate[row][col] = image.amplitudes[row];
      }
    }
    std::vector<std::vector<std::complex<double>>> next(
        dim, std::vector<std::complex<double>>(dim, 0.0));
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t c = 0; c < dim; ++c) {
          next[r][c] += gate[r][k] * product[k][c];
        }
      }
    }
    product = std::move(next);
  }

  const DenseState stepwise = dense_run(circuit);
  for (std::size_t r = 0; r < dim; ++r) {
    CHECK(std::abs(stepwise.amplitudes[r] - product[r][0]) < 1e-10);
  }
}

TEST_CASE("dense_channel_average fixtures") {
  SUBCASE("Bell + depolarizing on q0") {
    const double p = 0.2;
    const auto dist =
        dense_channel_average(bell_then({ChannelKind::Depolarizing, 0, p}), 2);
    CHECK(dist[0] == doctest::Approx(0.5 - p / 4).epsilon(1e-12));
    CHECK(dist[1] == doctest::Approx(p / 4).epsilon(1e-12));
    CHECK(dist[2] == doctest::Approx(p / 4).epsilon(1e-12));
    CHECK(dist[3] == doctest::Approx(0.5 - p / 4).epsilon(1e-12));
  }
  SUBCASE("Bell + damping on q0 puts weight p/2 on |01>") {
    const double p = 0.3;
    const auto dist = dense_channel_average(
        bell_then({ChannelKind::AmplitudeDamping, 0, p}), 2);
    CHECK(dist[1] == doctest::Approx(p / 2).epsilon(1e-12));
    CHECK(dist[2] == doctest::Approx(0.0));
  }
  SUBCASE("zero noise is an indicator distribution") {
    NoiseSpec quiet;
    const auto dist = dense_channel_average(generate_ghz(2), quiet);
    CHECK(dist[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dist[3] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dist[1] == 0.0);
    CHECK(dist[2] == 0.0);
  }
}

TEST_CASE("branch probabilities sum to one") {
  NoiseSpec spec;
  spec.p_depol = 0.1;
  spec.p_damp = 0.25;
  spec.p_flip = 0.05;
  const Circuit ghz = generate_ghz(3);
  const Schedule schedule = build_schedule(ghz, spec);
  double total = 0.0;
  enumerate_channel_branches(schedule, 3, 10'000'000,
                             [&total](double prob, const DenseState&) {
                               total += prob;
                             });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("branch cap raises a resource error") {
  NoiseSpec spec;
  spec.p_depol = 0.1;
  spec.p_damp = 0.1;
  spec.p_flip = 0.1;
  const Circuit qft = generate_qft(3);
  CHECK_THROWS_AS(dense_channel_average(qft, spec, 1000), ResourceLimitError);
}

TEST_CASE("Monte-Carlo estimates converge to the channel average") {
  struct Fixture {
    Circuit circuit;
    NoiseSpec spec;
  };
  std::vector<Fixture> fixtures;
  {
    NoiseSpec all;
    all.p_depol = 0.08;
    all.p_damp = 0.1;
    all.p_flip = 0.06;
    fixtures.push_back({generate_ghz(2), all});
    NoiseSpec depol_only;
    depol_only.p_depol = 0.1;
    fixtures.push_back({generate_ghz(3), depol_only});
    NoiseSpec damp_only;
    damp_only.p_damp = 0.15;
    fixtures.push_back({generate_qft(2), damp_only});
  }
  std::uint64_t seed = 2024;
  for (const Fixture& fixture : fixtures) {
    const std::size_t n = fixture.circuit.num_qubits;
    const auto exact = dense_channel_average(fixture.circuit, fixture.spec);

    std::vector<PropertySpec> props;
    for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) {
      props.push_back(basis_property(bits_of_index(i, n)));
    }
    SamplingPlan plan;
    plan.num_runs = 40'000;
    const Aggregate agg =
        run_ensemble(fixture.circuit, fixture.spec, plan, props, 2, seed++);
    const auto bars = estimate_error_bars(agg);
    for (std::size_t i = 0; i < props.size(); ++i) {
      const double tolerance = 3.0 * std::max(bars[i].empirical_stderr, 1e-4);
      CHECK(std::abs(agg.estimates[i] - exact[i]) <= tolerance);
    }
  }
}

TEST_SUITE_END();
