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

#include "stochdd/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "stochdd/errors.hpp"
#include "stochdd/rng.hpp"

namespace stochdd {

SamplingPlan plan_samples(std::size_t num_properties, double epsilon,
                          double delta) {
  if (num_properties < 1) {
    throw std::invalid_argument("plan_samples: need at least one property");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("plan_samples: epsilon must be in (0, 1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("plan_samples: delta must be in (0, 1)");
  }
  SamplingPlan plan;
  plan.num_properties = num_properties;
  plan.epsilon = epsilon;
  plan.delta = delta;
  const double raw =
      std::log(2.0 * static_cast<double>(num_properties) / delta) /
      (4.0 * epsilon * epsilon);
  plan.num_runs = static_cast<std::size_t>(std::max(1.0, std::ceil(raw)));
  return plan;
}

PropertySpec basis_property(std::string bits) {
  return {"P(" + bits + ")", std::move(bits)};
}

PropertySpec fidelity_property(std::string label, Circuit reference) {
  return {std::move(label), std::move(reference)};
}

std::vector<ErrorBar> estimate_error_bars(const Aggregate& aggregate) {
  const std::size_t m = aggregate.num_runs;
  if (m < 2) {
    throw std::invalid_argument("estimate_error_bars: need at least 2 runs");
  }
  const double halfwidth = std::sqrt(
      std::log(2.0 * static_cast<double>(aggregate.plan.num_properties) /
               aggregate.plan.delta) /
      (2.0 * static_cast<double>(m)));
  std::vector<ErrorBar> bars;
  bars.reserve(aggregate.estimates.size());
  for (std::size_t l = 0; l < aggregate.estimates.size(); ++l) {
    const double sum = aggregate.value_sums[l];
    const double sum_sq = aggregate.value_sums_sq[l];
    const double md = static_cast<double>(m);
    const double variance =
        std::max(0.0, (sum_sq - sum * sum / md) / (md - 1.0));
    bars.push_back({halfwidth, std::sqrt(variance / md)});
  }
  return bars;
}

namespace {

// Materializes property reference states into the run's arena.
std::vector<StateDD> materialize_references(
    DDArena& arena, std::size_t n, std::span<const PropertySpec> properties) {
  std::vector<StateDD> refs;
  refs.reserve(properties.size());
  for (const PropertySpec& prop : properties) {
    if (const auto* bits = std::get_if<std::string>(&prop.target)) {
      refs.push_back(arena.make_basis_state(n, *bits));
    } else if (const auto* amps =
                   std::get_if<std::vector<ComplexValue>>(&prop.target)) {
      StateDD ref = arena.make_state_from_amplitudes(*amps);
      if (ref.num_qubits() != n) {
        throw std::invalid_argument(
            "property reference has wrong qubit count: " + prop.label);
      }
      refs.push_back(std::move(ref));
    } else {
      const Circuit& ref_circuit = std::get<Circuit>(prop.target);
      if (ref_circuit.num_qubits != n) {
        throw std::invalid_argument(
            "property reference has wrong qubit count: " + prop.label);
      }
      StateDD ref =
          arena.make_basis_state(n, std::string(n, '0'));
      for (const GateOp& op : ref_circuit.ops) {
        if (op.kind == GateKind::Measure || op.kind == GateKind::Barrier) {
          continue;
        }
        ref = apply_matrix(arena.gate_matrix(op, n), ref);
      }
      refs.push_back(std::move(ref));
    }
  }
  return refs;
}

// Per-run cache of operator DDs (gates repeat, Pauli/Kraus factors repeat).
class OperatorCache {
 public:
  OperatorCache(DDArena& arena, std::size_t n) : arena_(arena), n_(n) {}

  const MatrixDD& gate(const GateOp& op) {
    std::vector<std::uint64_t> key{static_cast<std::uint64_t>(op.kind)};
    for (double p : op.params) {
      std::uint64_t bits;
      std::memcpy(&bits, &p, sizeof(bits));
      key.push_back(bits);
    }
    key.push_back(0xFFFFFFFFFFFFFFFFULL);
    for (Qubit q : op.targets) key.push_back(q);
    key.push_back(0xFFFFFFFFFFFFFFFFULL);
    for (Qubit q : op.controls) key.push_back(q);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(std::move(key), arena_.gate_matrix(op, n_)).first;
    }
    return it->second;
  }

 private:
  DDArena& arena_;
  std::size_t n_;
  std::map<std::vector<std::uint64_t>, MatrixDD> cache_;
};

}  // namespace

RunResult run_schedule_once(DDArena& arena, const Schedule& schedule,
                            std::size_t num_qubits,
                            std::span<const PropertySpec> properties,
                            std::size_t run_index, std::uint64_t base_seed) {
  arena.reset();
  RandomStream rng(mix_seed(base_seed, run_index));
  RunResult result;
  result.run_index = run_index;

  {
    OperatorCache ops(arena, num_qubits);
    StateDD psi = arena.make_basis_state(num_qubits, std::string(num_qubits, '0'));
    for (const ScheduleStep& step : schedule) {
      if (const GateOp* gate = std::get_if<GateOp>(&step)) {
        psi = apply_matrix(ops.gate(*gate), psi);
        continue;
      }
      ChannelOutcome outcome =
          apply_noise_site(psi, std::get<NoiseSite>(step), rng);
      psi = std::move(outcome.state);
      if (outcome.error_event) {
        ++result.error_event_count;
      }
    }

    const std::vector<StateDD> refs =
        materialize_references(arena, num_qubits, properties);
    result.property_values.reserve(refs.size());
    for (const StateDD& ref : refs) {
      const ComplexValue ip = inner_product(ref, psi);
      const double value = ip.mag2();
      if (value > 1.0 + 1e-9) {
        throw NumericDegeneracyError("property value above 1: " +
                                     std::to_string(value));
      }
      result.property_values.push_back(value);
    }
    result.measured_bits = measure_all(psi, rng);
  }
  return result;
}

RunResult run_once(const Circuit& circuit, const NoiseSpec& spec,
                   std::span<const PropertySpec> properties,
                   std::size_t run_index, std::uint64_t base_seed) {
  DDArena arena;
  return run_schedule_once(arena, build_schedule(circuit, spec),
                           circuit.num_qubits, properties, run_index,
                           base_seed);
}

namespace {

constexpr std::size_t kRunBlock = 64;

struct BlockPartial {
  std::map<std::string, std::uint64_t> histogram;
  std::vector<double> sums;
  std::vector<double> sums_sq;
  std::uint64_t error_events = 0;
};

}  // namespace

Aggregate run_ensemble(const Schedule& schedule, std::size_t num_qubits,
                       const SamplingPlan& plan,
                       std::span<const PropertySpec> properties,
                       std::size_t workers, std::uint64_t base_seed,
                       const ProgressFn& progress) {
  if (workers < 1) {
    throw std::invalid_argument("run_ensemble: need at least one worker");
  }
  if (plan.num_runs < 1) {
    throw std::invalid_argument("run_ensemble: need at least one run");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t total = plan.num_runs;
  const std::size_t num_blocks = (total + kRunBlock - 1) / kRunBlock;
  const std::size_t num_props = properties.size();

  std::vector<BlockPartial> blocks(num_blocks);
  std::atomic<std::size_t> done{0};
  std::atomic<bool> abort{false};
  std::mutex failure_mutex;
  std::optional<std::size_t> failed_index;
  std::string failure_message;

  auto worker_fn = [&](std::size_t worker_id) {
    DDArena arena;
    for (std::size_t b = worker_id; b < num_blocks; b += workers) {
      if (abort.load(std::memory_order_relaxed)) return;
      BlockPartial& partial = blocks[b];
      partial.sums.assign(num_props, 0.0);
      partial.sums_sq.assign(num_props, 0.0);
      const std::size_t begin = b * kRunBlock;
      const std::size_t end = std::min(begin + kRunBlock, total);
      for (std::size_t run = begin; run < end; ++run) {
        if (abort.load(std::memory_order_relaxed)) return;
        try {
          RunResult r = run_schedule_once(arena, schedule, num_qubits,
                                          properties, run, base_seed);
          ++partial.histogram[r.measured_bits];
          for (std::size_t l = 0; l < num_props; ++l) {
            partial.sums[l] += r.property_values[l];
            partial.sums_sq[l] += r.property_values[l] * r.property_values[l];
          }
          partial.error_events += r.error_event_count;
        } catch (const std::exception& e) {
          std::scoped_lock lock(failure_mutex);
          if (!failed_index.has_value() || run < *failed_index) {
            failed_index = run;
            failure_message = e.what();
          }
          abort.store(true, std::memory_order_relaxed);
          return;
        }
        done.fetch_add(1, std::memory_order_relaxed);
      }
    }
  };

  if (workers == 1) {
    worker_fn(0);
    if (progress) progress(done.load(), total);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back(worker_fn, w);
    }
    if (progress) {
      while (done.load(std::memory_order_relaxed) < total &&
             !abort.load(std::memory_order_relaxed)) {
        progress(done.load(std::memory_order_relaxed), total);
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
      }
    }
    for (std::thread& t : threads) t.join();
    if (progress) progress(done.load(), total);
  }

  if (failed_index.has_value()) {
    throw RunFailure(*failed_index, failure_message);
  }

  Aggregate agg;
  agg.plan = plan;
  agg.base_seed = base_seed;
  agg.num_runs = total;
  agg.value_sums.assign(num_props, 0.0);
  agg.value_sums_sq.assign(num_props, 0.0);
  for (const PropertySpec& p : properties) {
    agg.property_labels.push_back(p.label);
  }
  // Merge in block order: the summation order is a function of run_index
  // alone, so the result is independent of the worker count.
  for (const BlockPartial& partial : blocks) {
    for (const auto& [bits, count] : partial.histogram) {
      agg.histogram[bits] += count;
    }
    for (std::size_t l = 0; l < num_props; ++l) {
      agg.value_sums[l] += partial.sums[l];
      agg.value_sums_sq[l] += partial.sums_sq[l];
    }
    agg.total_error_events += partial.error_events;
  }
  agg.estimates.resize(num_props);
  for (std::size_t l = 0; l < num_props; ++l) {
    agg.estimates[l] = agg.value_sums[l] / static_cast<double>(total);
  }
  agg.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return agg;
}

Aggregate run_ensemble(const Circuit& circuit, const NoiseSpec& spec,
                       const SamplingPlan& plan,
                       std::span<const PropertySpec> properties,
                       std::size_t workers, std::uint64_t base_seed,
                       const ProgressFn& progress) {
  const std::vector<std::string> issues = validate(circuit);
  if (!issues.empty()) {
    throw std::invalid_argument("run_ensemble: invalid circuit: " + issues[0]);
  }
  return run_ensemble(build_schedule(circuit, spec), circuit.num_qubits, plan,
                      properties, workers, base_seed, progress);
}

}  // namespace stochdd
