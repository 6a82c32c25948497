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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stochdd/circuit.hpp"
#include "stochdd/dd.hpp"
#include "stochdd/noise.hpp"

namespace stochdd {

/// Monte-Carlo sizing: with M = ceil(ln(2L/delta) / (4 eps^2)) independent
/// runs, all L tracked quadratic properties are within eps of their true
/// values with probability at least 1 - delta (Hoeffding + union bound).
struct SamplingPlan {
  std::size_t num_properties = 1;
  double epsilon = 0.01;
  double delta = 0.05;
  std::size_t num_runs = 1;
};

/// Derives M from (L, eps, delta). Natural logarithm: the Hoeffding bound is
/// an e-exponential, so inverting it forces ln.
SamplingPlan plan_samples(std::size_t num_properties, double epsilon,
                          double delta);

/// A quadratic property |<omega|psi>|^2. The reference omega is specified
/// arena-independently and materialized into each run's arena:
/// a basis bitstring, a dense amplitude vector (small n), or the noiseless
/// output of a circuit.
struct PropertySpec {
  std::string label;
  std::variant<std::string, std::vector<ComplexValue>, Circuit> target;
};

PropertySpec basis_property(std::string bits);
PropertySpec fidelity_property(std::string label, Circuit reference);

/// One sampled trajectory: final measurement and exact per-property values.
struct RunResult {
  std::size_t run_index = 0;
  std::string measured_bits;
  std::vector<double> property_values;
  std::uint64_t error_event_count = 0;

  bool operator==(const RunResult&) const = default;
};

/// Merged ensemble statistics. Histogram counts sum to num_runs; estimates
/// are the per-property means of |<omega_l|psi_j>|^2.
struct Aggregate {
  std::map<std::string, std::uint64_t> histogram;
  std::vector<std::string> property_labels;
  std::vector<double> estimates;      // per-property mean
  std::vector<double> value_sums;     // per-property sum of values
  std::vector<double> value_sums_sq;  // per-property sum of squared values
  std::size_t num_runs = 0;
  std::uint64_t base_seed = 0;
  std::uint64_t total_error_events = 0;
  double wall_time_s = 0.0;
  SamplingPlan plan;
};

struct ErrorBar {
  double hoeffding_halfwidth = 0.0;
  double empirical_stderr = 0.0;
};

/// Hoeffding half-width sqrt(ln(2L/delta) / (2M)) alongside the empirical
/// standard error, per property. Requires M >= 2.
std::vector<ErrorBar> estimate_error_bars(const Aggregate& aggregate);

/// One stochastic run of a schedule in the given arena (which is reset).
/// Starts from |0...0>, executes gates and channel sites in order, evaluates
/// every property by inner product on the sampled state, then draws the
/// measurement. The RNG is seeded with mix_seed(base_seed, run_index), so a
/// run is a pure function of (schedule, properties, run_index, base_seed).
RunResult run_schedule_once(DDArena& arena, const Schedule& schedule,
                            std::size_t num_qubits,
                            std::span<const PropertySpec> properties,
                            std::size_t run_index, std::uint64_t base_seed);

/// Convenience wrapper building the schedule from (circuit, spec).
RunResult run_once(const Circuit& circuit, const NoiseSpec& spec,
                   std::span<const PropertySpec> properties,
                   std::size_t run_index, std::uint64_t base_seed);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Executes plan.num_runs independent runs with run_index 0..M-1 across
/// `workers` threads, each owning an isolated arena. Runs are partitioned by
/// static striding over fixed 64-run blocks and partial sums are merged in
/// block order, so the Aggregate is bit-identical for any worker count. A
/// failing run aborts the ensemble with RunFailure naming the lowest failing
/// run index.
Aggregate run_ensemble(const Schedule& schedule, std::size_t num_qubits,
                       const SamplingPlan& plan,
                       std::span<const PropertySpec> properties,
                       std::size_t workers, std::uint64_t base_seed,
                       const ProgressFn& progress = {});

Aggregate run_ensemble(const Circuit& circuit, const NoiseSpec& spec,
                       const SamplingPlan& plan,
                       std::span<const PropertySpec> properties,
                       std::size_t workers, std::uint64_t base_seed,
                       const ProgressFn& progress = {});

}  // namespace stochdd
