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

#include <string>

#include "stochdd/noise.hpp"
#include "stochdd/sampler.hpp"

namespace stochdd {

enum class ResultFormat { Json, Csv };

/// Context the aggregate alone does not carry.
struct RunMeta {
  std::string circuit_name;
  std::size_t num_qubits = 0;
  NoiseSpec noise;
  std::size_t workers = 0;
};

/// Renders an aggregate as a machine-readable document.
///
/// JSON: one object with keys (sorted bytewise)
///   M, circuit, estimates, histogram, n, noise, seed, wall_time_s, workers;
/// estimates entries carry {hoeffding_halfwidth, label, stderr, value} with
/// stderr/halfwidth null when M < 2. Floats print with 17 significant digits,
/// so equal aggregates serialize to identical bytes.
///
/// CSV: header record,key,value,hoeffding_halfwidth,stderr followed by meta
/// rows, histogram rows and estimate rows.
///
/// `include_volatile = false` pins the two execution-dependent fields
/// (wall_time_s to 0, workers to 0), making the document a pure function of
/// (config, seed) for comparisons across hosts and worker counts.
std::string emit_result(const Aggregate& aggregate, const RunMeta& meta,
                        ResultFormat format, bool include_volatile = true);

}  // namespace stochdd
