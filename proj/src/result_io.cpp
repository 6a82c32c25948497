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

#include "stochdd/result_io.hpp"

#include <cstdio>

namespace stochdd {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

const char* policy_name(NoisePolicy policy) {
  return policy == NoisePolicy::OperandsOnly ? "operands-only"
                                             : "all-qubits-per-step";
}

std::string emit_json(const Aggregate& agg, const RunMeta& meta,
                      bool include_volatile) {
  const bool have_bars = agg.num_runs >= 2;
  const std::vector<ErrorBar> bars =
      have_bars ? estimate_error_bars(agg) : std::vector<ErrorBar>{};

  std::string out = "{\n";
  out += "  \"M\": " + std::to_string(agg.num_runs) + ",\n";
  out += "  \"circuit\": \"" + json_escape(meta.circuit_name) + "\",\n";

  out += "  \"estimates\": [";
  for (std::size_t l = 0; l < agg.estimates.size(); ++l) {
    if (l != 0) out += ",";
    out += "\n    {";
    out += "\"hoeffding_halfwidth\": ";
    out += have_bars ? fmt_double(bars[l].hoeffding_halfwidth) : "null";
    out += ", \"label\": \"" + json_escape(agg.property_labels[l]) + "\"";
    out += ", \"stderr\": ";
    out += have_bars ? fmt_double(bars[l].empirical_stderr) : "null";
    out += ", \"value\": " + fmt_double(agg.estimates[l]);
    out += "}";
  }
  out += agg.estimates.empty() ? "],\n" : "\n  ],\n";

  out += "  \"histogram\": {";
  bool first = true;
  for (const auto& [bits, count] : agg.histogram) {
    if (!first) out += ",";
    out += "\n    \"" + bits + "\": " + std::to_string(count);
    first = false;
  }
  out += agg.histogram.empty() ? "},\n" : "\n  },\n";

  out += "  \"n\": " + std::to_string(meta.num_qubits) + ",\n";
  out += "  \"noise\": {\"p_damp\": " + fmt_double(meta.noise.p_damp) +
         ", \"p_depol\": " + fmt_double(meta.noise.p_depol) +
         ", \"p_flip\": " + fmt_double(meta.noise.p_flip) +
         ", \"policy\": \"" + policy_name(meta.noise.policy) + "\"},\n";
  out += "  \"seed\": " + std::to_string(agg.base_seed) + ",\n";
  out += "  \"wall_time_s\": " +
         fmt_double(include_volatile ? agg.wall_time_s : 0.0) + ",\n";
  out += "  \"workers\": " +
         std::to_string(include_volatile ? meta.workers : 0) + "\n";
  out += "}\n";
  return out;
}

std::string emit_csv(const Aggregate& agg, const RunMeta& meta,
                     bool include_volatile) {
  const bool have_bars = agg.num_runs >= 2;
  const std::vector<ErrorBar> bars =
      have_bars ? estimate_error_bars(agg) : std::vector<ErrorBar>{};

  std::string out = "record,key,value,hoeffding_halfwidth,stderr\n";
  auto meta_row = [&out](const std::string& key, const std::string& value) {
    out += "meta," + key + "," + value + ",,\n";
  };
  meta_row("circuit", meta.circuit_name);
  meta_row("n", std::to_string(meta.num_qubits));
  meta_row("M", std::to_string(agg.num_runs));
  meta_row("seed", std::to_string(agg.base_seed));
  meta_row("p_depol", fmt_double(meta.noise.p_depol));
  meta_row("p_damp", fmt_double(meta.noise.p_damp));
  meta_row("p_flip", fmt_double(meta.noise.p_flip));
  meta_row("policy", policy_name(meta.noise.policy));
  meta_row("workers", std::to_string(include_volatile ? meta.workers : 0));
  meta_row("wall_time_s",
           fmt_double(include_volatile ? agg.wall_time_s : 0.0));
  for (const auto& [bits, count] : agg.histogram) {
    out += "histogram," + bits + "," + std::to_string(count) + ",,\n";
  }
  for (std::size_t l = 0; l < agg.estimates.size(); ++l) {
    out += "estimate," + agg.property_labels[l] + "," +
           fmt_double(agg.estimates[l]) + ",";
    out += have_bars ? fmt_double(bars[l].hoeffding_halfwidth) : "";
    out += ",";
    out += have_bars ? fmt_double(bars[l].empirical_stderr) : "";
    out += "\n";
  }
  return out;
}

}  // namespace

std::string emit_result(const Aggregate& aggregate, const RunMeta& meta,
                        ResultFormat format, bool include_volatile) {
  return format == ResultFormat::Json
             ? emit_json(aggregate, meta, include_volatile)
             : emit_csv(aggregate, meta, include_volatile);
}

}  // namespace stochdd
