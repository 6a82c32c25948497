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

#include <cmath>

#include "doctest.h"
#include "stochdd/errors.hpp"
#include "stochdd/noise.hpp"
#include "stochdd/oracle.hpp"
#include "stochdd/sampler.hpp"
#include "test_helpers.hpp"

using namespace stochdd;
using namespace stochdd::testing;

namespace {

Schedule bell_then_depol(double p) {
  Schedule s;
  s.emplace_back(GateOp{GateKind::H, {}, {0}, {}});
  s.emplace_back(GateOp{GateKind::CX, {}, {1}, {0}});
  s.emplace_back(NoiseSite{ChannelKind::Depolarizing, 0, p});
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("sampler");

TEST_CASE("plan_samples sizes M per the Hoeffding inversion") {
  SUBCASE("the headline configuration") {
    const SamplingPlan plan = plan_samples(1000, 0.01, 0.05);
    CHECK(plan.num_runs == 26'492);
  }
  SUBCASE("small example") {
    // ln(2/delta) = ln(2/(1 - 2/e)) ~ 2.024; / (4 * 0.25) -> ceil = 3.
    const SamplingPlan plan = plan_samples(1, 0.5, 1.0 - 2.0 / std::exp(1.0));
    CHECK(plan.num_runs == 3);
  }
  SUBCASE("doubling L adds ln(2)/(4 eps^2) before rounding") {
    for (std::size_t l : {1, 7, 100, 4096}) {
      for (double eps : {0.5, 0.05, 0.01}) {
        const double delta = 0.05;
        const double raw_l =
            std::log(2.0 * static_cast<double>(l) / delta) / (4 * eps * eps);
        const double raw_2l =
            std::log(4.0 * static_cast<double>(l) / delta) / (4 * eps * eps);
        CHECK(raw_2l - raw_l ==
              doctest::Approx(std::log(2.0) / (4 * eps * eps)).epsilon(1e-9));
        CHECK(plan_samples(l, eps, delta).num_runs ==
              static_cast<std::size_t>(std::ceil(raw_l)));
        CHECK(plan_samples(2 * l, eps, delta).num_runs ==
              static_cast<std::size_t>(std::ceil(raw_2l)));
      }
    }
  }
  SUBCASE("out-of-range arguments rejected") {
    CHECK_THROWS_AS(plan_samples(0, 0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(plan_samples(1, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(plan_samples(1, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(plan_samples(1, 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(plan_samples(1, 0.1, 1.0), std::invalid_argument);
  }
}

TEST_CASE("run_once") {
  const Circuit ghz = generate_ghz(2);
  NoiseSpec quiet;
  const std::vector<PropertySpec> props{basis_property("00")};

  SUBCASE("noiseless GHZ: P(00) is 1/2 every run, outcomes in {00, 11}") {
    for (std::size_t run = 0; run < 50; ++run) {
      const RunResult r = run_once(ghz, quiet, props, run, 9);
      CHECK(r.property_values[0] == doctest::Approx(0.5).epsilon(1e-12));
      const bool valid = r.measured_bits == "00" || r.measured_bits == "11";
      CHECK(valid);
      CHECK(r.error_event_count == 0);
    }
  }
  SUBCASE("determinism: identical inputs give identical results") {
    NoiseSpec noisy;
    noisy.p_depol = 0.1;
    noisy.p_damp = 0.1;
    noisy.p_flip = 0.1;
    const RunResult a = run_once(ghz, noisy, props, 17, 42);
    const RunResult b = run_once(ghz, noisy, props, 17, 42);
    CHECK(a == b);
  }
}

TEST_CASE("run_ensemble") {
  SUBCASE("worker count does not change the aggregate") {
    NoiseSpec noisy;
    noisy.p_depol = 0.001;
    noisy.p_damp = 0.002;
    noisy.p_flip = 0.001;
    const Circuit ghz = generate_ghz(4);
    std::vector<PropertySpec> props{basis_property("0000"),
                                    basis_property("1111")};
    SamplingPlan plan;
    plan.num_runs = 300;
    const Aggregate one = run_ensemble(ghz, noisy, plan, props, 1, 7);
    const Aggregate eight = run_ensemble(ghz, noisy, plan, props, 8, 7);
    CHECK(one.histogram == eight.histogram);
    CHECK(one.value_sums == eight.value_sums);
    CHECK(one.value_sums_sq == eight.value_sums_sq);
    CHECK(one.estimates == eight.estimates);
    CHECK(one.total_error_events == eight.total_error_events);
  }
  SUBCASE("crafted Bell + depolarizing matches the analytic ensemble") {
    const double p = 0.2;
    const Schedule schedule = bell_then_depol(p);
    std::vector<PropertySpec> props{basis_property("01")};
    SamplingPlan plan;
    plan.num_runs = 100'000;
    const Aggregate agg = run_ensemble(schedule, 2, plan, props, 2, 31);
    CHECK(std::abs(agg.estimates[0] - p / 4) <= 0.005);
  }
  SUBCASE("zero-noise GHZ(3) fidelity with the exact GHZ state is one") {
    NoiseSpec quiet;
    const Circuit ghz = generate_ghz(3);
    std::vector<PropertySpec> props{
        fidelity_property("F(ghz3)", generate_ghz(3))};
    SamplingPlan plan;
    plan.num_runs = 64;
    const Aggregate agg = run_ensemble(ghz, quiet, plan, props, 2, 3);
    CHECK(agg.estimates[0] == 1.0);  // exact at the canonical-value level
  }
  SUBCASE("histogram counts sum to M and match inner-product estimates") {
    NoiseSpec noisy;
    noisy.p_depol = 0.05;
    const Circuit ghz = generate_ghz(2);
    std::vector<PropertySpec> props{basis_property("00"),
                                    basis_property("01"),
                                    basis_property("10"),
                                    basis_property("11")};
    SamplingPlan plan;
    plan.num_runs = 40'000;
    const Aggregate agg = run_ensemble(ghz, noisy, plan, props, 2, 11);
    std::uint64_t total = 0;
    for (const auto& [bits, count] : agg.histogram) total += count;
    CHECK(total == plan.num_runs);
    const auto bars = estimate_error_bars(agg);
    for (std::size_t i = 0; i < props.size(); ++i) {
      const auto it = agg.histogram.find(props[i].label.substr(2, 2));
      const double freq =
          it == agg.histogram.end()
              ? 0.0
              : static_cast<double>(it->second) / plan.num_runs;
      // Histogram frequency and mean property value estimate the same
      // quantity; 4 combined standard errors covers both samplings.
      const double sigma_hist = std::sqrt(
          std::max(agg.estimates[i] * (1 - agg.estimates[i]), 1e-4) /
          plan.num_runs);
      CHECK(std::abs(freq - agg.estimates[i]) <=
            4.0 * (sigma_hist + bars[i].empirical_stderr));
    }
  }
  SUBCASE("a failing run reports its index") {
    Schedule bad;
    bad.emplace_back(GateOp{GateKind::H, {}, {0}, {}});
    bad.emplace_back(NoiseSite{ChannelKind::PhaseFlip, 9, 0.5});  // bad qubit
    SamplingPlan plan;
    plan.num_runs = 10;
    try {
      run_ensemble(bad, 1, plan, {}, 2, 5);
      FAIL("expected RunFailure");
    } catch (const RunFailure& e) {
      CHECK(e.run_index() == 0);
    }
  }
}

TEST_CASE("unbiasedness: single runs estimate the property in expectation") {
  // 100 independent ensembles of M = 10^4 on the Bell/depolarizing fixture;
  // the grand mean must sit within 4 combined standard errors of the
  // analytic value.
  const double p = 0.2;
  const Schedule schedule = bell_then_depol(p);
  const auto exact =
      dense_channel_average(schedule, 2);  // P(00) = 0.45 analytically
  std::vector<PropertySpec> props{basis_property("00")};

  const std::size_t ensembles = 100;
  SamplingPlan plan;
  plan.num_runs = 10'000;
  double grand_sum = 0.0, grand_sq = 0.0;
  for (std::size_t e = 0; e < ensembles; ++e) {
    const Aggregate agg =
        run_ensemble(schedule, 2, plan, props, 2, 1000 + e);
    grand_sum += agg.estimates[0];
    grand_sq += agg.estimates[0] * agg.estimates[0];
  }
  const double mean = grand_sum / ensembles;
  const double var =
      std::max(0.0, (grand_sq - grand_sum * grand_sum / ensembles) /
                        (ensembles - 1.0));
  const double se = std::sqrt(var / ensembles);
  CHECK(std::abs(mean - exact[0]) <= 4.0 * se);
}

TEST_CASE("coverage: planned M delivers the advertised accuracy") {
  // M = plan_samples(1, 0.05, 0.05); at least 90 of 100 ensembles land
  // within eps of the oracle value (slack on the >= 95% guarantee).
  const double p = 0.2;
  const Schedule schedule = bell_then_depol(p);
  const auto exact = dense_channel_average(schedule, 2);
  const SamplingPlan plan = plan_samples(1, 0.05, 0.05);
  std::vector<PropertySpec> props{basis_property("00")};

  std::size_t hits = 0;
  for (std::size_t e = 0; e < 100; ++e) {
    const Aggregate agg =
        run_ensemble(schedule, 2, plan, props, 2, 77'000 + e);
    hits += std::abs(agg.estimates[0] - exact[0]) <= 0.05;
  }
  CHECK(hits >= 90);
}

TEST_CASE("estimate_error_bars") {
  SUBCASE("planned M gives a half-width within the theorem's constant") {
    const SamplingPlan plan = plan_samples(50, 0.02, 0.05);
    Aggregate agg;
    agg.plan = plan;
    agg.num_runs = plan.num_runs;
    agg.property_labels = {"x"};
    agg.estimates = {0.5};
    agg.value_sums = {0.5 * static_cast<double>(plan.num_runs)};
    agg.value_sums_sq = {0.25 * static_cast<double>(plan.num_runs)};
    const auto bars = estimate_error_bars(agg);
    // The theorem's advertised M makes the rigorous Hoeffding half-width
    // land at eps * sqrt(2) (not eps); see the plan/bound discussion in the
    // README.
    CHECK(bars[0].hoeffding_halfwidth <=
          0.02 * std::sqrt(2.0) * (1.0 + 1e-9));
    CHECK(bars[0].hoeffding_halfwidth > 0.02);
    CHECK(bars[0].empirical_stderr == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("single-run aggregates are rejected") {
    Aggregate agg;
    agg.num_runs = 1;
    CHECK_THROWS_AS(estimate_error_bars(agg), std::invalid_argument);
  }
  SUBCASE("constant properties have zero standard error") {
    NoiseSpec quiet;
    std::vector<PropertySpec> props{basis_property("00")};
    SamplingPlan plan;
    plan.num_runs = 1000;
    const Aggregate agg =
        run_ensemble(generate_ghz(2), quiet, plan, props, 2, 21);
    const auto bars = estimate_error_bars(agg);
    CHECK(bars[0].empirical_stderr <= 1e-12);
  }
}

TEST_SUITE_END();
