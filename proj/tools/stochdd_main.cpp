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
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "stochdd/circuit.hpp"
#include "stochdd/dd.hpp"
#include "stochdd/errors.hpp"
#include "stochdd/noise.hpp"
#include "stochdd/oracle.hpp"
#include "stochdd/qasm.hpp"
#include "stochdd/result_io.hpp"
#include "stochdd/sampler.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitRuntime = 4;

struct Options {
  std::string builtin;
  std::size_t qubits = 0;
  std::string circuit_file;
  double p_depol = 0.001;
  double p_damp = 0.002;
  double p_flip = 0.001;
  std::string policy = "operands-only";
  double eps = 0.01;
  double delta = 0.05;
  std::size_t num_properties = 1000;
  std::size_t shots = 0;  // 0 = derive from (L, eps, delta)
  std::size_t workers = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> properties;
  bool all_basis = false;
  std::string format = "json";
  std::string out_path;
  bool verify = false;
  std::size_t qubits_max = 10;
  bool stable_output = false;
  bool progress = false;
  std::string dot_path;
};

int fail_input(const std::string& message) {
  std::cerr << "stochdd: error: " << message << "\n";
  return kExitInput;
}

int fail_runtime(const std::string& message) {
  std::cerr << "stochdd: error: " << message << "\n";
  return kExitRuntime;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("SIM_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

stochdd::Circuit load_circuit(const Options& opt) {
  if (!opt.builtin.empty()) {
    if (opt.qubits == 0) {
      throw std::invalid_argument("--builtin requires --qubits");
    }
    if (opt.builtin == "ghz") return stochdd::generate_ghz(opt.qubits);
    if (opt.builtin == "qft") return stochdd::generate_qft(opt.qubits);
    throw std::invalid_argument("unknown builtin '" + opt.builtin +
                                "' (expected ghz or qft)");
  }
  std::ifstream in(opt.circuit_file);
  if (!in) {
    throw std::invalid_argument("cannot open circuit file: " +
                                opt.circuit_file);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string stem = opt.circuit_file;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) {
    stem = stem.substr(slash + 1);
  }
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) {
    stem = stem.substr(0, dot);
  }
  std::vector<std::string> notes;
  stochdd::Circuit circuit = stochdd::parse_qasm(buffer.str(), stem, &notes);
  for (const std::string& note : notes) {
    std::cerr << "stochdd: note: " << note << "\n";
  }
  return circuit;
}

int run_verify(const stochdd::Circuit& circuit, const Options& opt) {
  if (circuit.num_qubits > opt.qubits_max) {
    return fail_runtime("--verify: circuit has " +
                        std::to_string(circuit.num_qubits) +
                        " qubits, above --qubits-max " +
                        std::to_string(opt.qubits_max));
  }
  stochdd::DDArena arena;
  stochdd::StateDD psi = arena.make_basis_state(
      circuit.num_qubits, std::string(circuit.num_qubits, '0'));
  for (const stochdd::GateOp& op : circuit.ops) {
    if (op.kind == stochdd::GateKind::Measure ||
        op.kind == stochdd::GateKind::Barrier) {
      continue;
    }
    psi = apply_matrix(arena.gate_matrix(op, circuit.num_qubits), psi);
  }
  const std::vector<stochdd::ComplexValue> got = to_amplitudes(psi);
  const stochdd::DenseState expected = dense_run(circuit);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    max_diff = std::max(
        max_diff, std::abs(got[i].to_std() - expected.amplitudes[i]));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", max_diff);
  if (max_diff > 1e-8) {
    return fail_runtime(
        "--verify: decision-diagram and dense amplitudes differ by " +
        std::string(buf));
  }
  std::cout << "{\"verify\": \"ok\", \"n\": " << circuit.num_qubits
            << ", \"max_abs_diff\": " << buf << "}\n";
  return 0;
}

int run(const Options& opt) {
  stochdd::Circuit circuit = load_circuit(opt);
  const std::vector<std::string> issues = stochdd::validate(circuit);
  if (!issues.empty()) {
    std::string msg = "invalid circuit:";
    for (const std::string& issue : issues) msg += "\n  " + issue;
    return fail_input(msg);
  }

  if (!opt.dot_path.empty()) {
    stochdd::DDArena arena;
    stochdd::StateDD psi = arena.make_basis_state(
        circuit.num_qubits, std::string(circuit.num_qubits, '0'));
    for (const stochdd::GateOp& op : circuit.ops) {
      if (op.kind == stochdd::GateKind::Measure ||
          op.kind == stochdd::GateKind::Barrier) {
        continue;
      }
      psi = apply_matrix(arena.gate_matrix(op, circuit.num_qubits), psi);
    }
    std::ofstream dot(opt.dot_path);
    if (!dot) return fail_runtime("cannot write " + opt.dot_path);
    write_dot(psi, dot);
  }

  if (opt.verify) {
    return run_verify(circuit, opt);
  }

  stochdd::NoiseSpec noise;
  noise.p_depol = opt.p_depol;
  noise.p_damp = opt.p_damp;
  noise.p_flip = opt.p_flip;
  noise.rng_seed = opt.seed;
  if (opt.policy == "operands-only") {
    noise.policy = stochdd::NoisePolicy::OperandsOnly;
  } else if (opt.policy == "all-qubits-per-step") {
    noise.policy = stochdd::NoisePolicy::AllQubitsPerStep;
  } else {
    return fail_input("unknown --policy '" + opt.policy + "'");
  }

  std::vector<stochdd::PropertySpec> properties;
  for (const std::string& bits : opt.properties) {
    if (bits.size() != circuit.num_qubits ||
        bits.find_first_not_of("01") != std::string::npos) {
      return fail_input("--property '" + bits + "' is not a length-" +
                        std::to_string(circuit.num_qubits) + " bitstring");
    }
    properties.push_back(stochdd::basis_property(bits));
  }
  if (opt.all_basis) {
    if (circuit.num_qubits > 12) {
      return fail_input("--all-basis supports at most 12 qubits");
    }
    for (std::size_t i = 0; i < (std::size_t{1} << circuit.num_qubits); ++i) {
      std::string bits(circuit.num_qubits, '0');
      for (std::size_t q = 0; q < circuit.num_qubits; ++q) {
        bits[q] = ((i >> (circuit.num_qubits - 1 - q)) & 1) ? '1' : '0';
      }
      properties.push_back(stochdd::basis_property(bits));
    }
  }

  stochdd::SamplingPlan plan;
  if (opt.shots > 0) {
    plan.num_properties = opt.num_properties;
    plan.epsilon = opt.eps;
    plan.delta = opt.delta;
    plan.num_runs = opt.shots;
  } else {
    plan = stochdd::plan_samples(opt.num_properties, opt.eps, opt.delta);
  }

  const std::size_t workers =
      opt.workers > 0 ? opt.workers : default_workers();
  stochdd::ProgressFn progress;
  if (opt.progress) {
    progress = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "\rruns: %zu/%zu", done, total);
      if (done == total) std::fprintf(stderr, "\n");
      std::fflush(stderr);
    };
  }

  const stochdd::Aggregate agg = stochdd::run_ensemble(
      circuit, noise, plan, properties, workers, opt.seed, progress);

  stochdd::RunMeta meta;
  meta.circuit_name = circuit.name;
  meta.num_qubits = circuit.num_qubits;
  meta.noise = noise;
  meta.workers = workers;
  const auto format = opt.format == "csv" ? stochdd::ResultFormat::Csv
                                          : stochdd::ResultFormat::Json;
  const std::string document =
      emit_result(agg, meta, format, !opt.stable_output);

  if (opt.out_path.empty()) {
    std::cout << document;
  } else {
    std::ofstream out(opt.out_path);
    if (!out) return fail_runtime("cannot write " + opt.out_path);
    out << document;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stochdd: stochastic quantum-circuit simulator on decision diagrams"};
  Options opt;

  auto* builtin =
      app.add_option("--builtin", opt.builtin, "Builtin circuit: ghz or qft");
  app.add_option("--qubits", opt.qubits, "Qubit count for --builtin");
  auto* file = app.add_option("--circuit", opt.circuit_file,
                              "OpenQASM 2.0 circuit file");
  builtin->excludes(file);
  file->excludes(builtin);

  app.add_option("--p-depol", opt.p_depol, "Depolarizing probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--p-damp", opt.p_damp, "Amplitude-damping probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--p-flip", opt.p_flip, "Phase-flip probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--policy", opt.policy,
                 "Noise insertion policy: operands-only | all-qubits-per-step")
      ->capture_default_str();

  app.add_option("--eps", opt.eps, "Target accuracy epsilon")
      ->capture_default_str();
  app.add_option("--delta", opt.delta, "Confidence parameter delta")
      ->capture_default_str();
  app.add_option("--num-properties", opt.num_properties,
                 "Property budget L for sizing M")
      ->capture_default_str();
  app.add_option("--shots", opt.shots,
                 "Explicit run count M (overrides L/eps/delta sizing)");
  app.add_option("--workers", opt.workers,
                 "Worker threads (default: SIM_WORKERS or hardware)");
  app.add_option("--seed", opt.seed, "Base seed")->capture_default_str();

  app.add_option("--property", opt.properties,
                 "Track P(bitstring); repeatable");
  app.add_flag("--all-basis", opt.all_basis,
               "Track every basis outcome (n <= 12)");

  app.add_option("--format", opt.format, "Output format: json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", opt.out_path, "Write the result document here");
  app.add_flag("--stable-output", opt.stable_output,
               "Pin volatile fields (wall_time_s, workers) for byte-exact "
               "comparisons");
  app.add_flag("--progress", opt.progress, "Report progress on stderr");
  app.add_option("--dot", opt.dot_path,
                 "Write the noiseless final state as Graphviz dot");

  app.add_flag("--verify", opt.verify,
               "Compare the noiseless decision-diagram result against the "
               "dense reference and exit");
  app.add_option("--qubits-max", opt.qubits_max,
                 "Qubit cap for --verify")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (opt.builtin.empty() && opt.circuit_file.empty()) {
    std::cerr << "stochdd: error: exactly one circuit source required "
                 "(--builtin or --circuit)\n";
    return kExitUsage;
  }

  try {
    return run(opt);
  } catch (const stochdd::ParseError& e) {
    return fail_input(std::string("qasm: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return fail_input(e.what());
  } catch (const std::exception& e) {
    return fail_runtime(e.what());
  }
}
