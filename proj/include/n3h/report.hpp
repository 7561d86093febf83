// Copyright 2026 The n3h-dse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-delimited JSON reports. Every report opens with a manifest record
// naming the command, inputs (with FNV-1a digests), seed, tool version and
// timestamp. The timestamp comes from SOURCE_DATE_EPOCH when set.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "n3h/cost.hpp"
#include "n3h/dse.hpp"
#include "n3h/sched.hpp"
#include "n3h/split.hpp"

namespace n3h::report {

using nlohmann::ordered_json;

#ifdef N3H_VERSION
inline constexpr const char* kToolVersion = N3H_VERSION;
#else
inline constexpr const char* kToolVersion = "0.1.0";
#endif

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string digest(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

inline std::int64_t manifest_timestamp() {
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) {
    char* end = nullptr;
    const long long v = std::strtoll(e, &end, 10);
    if (*end == '\0') return v;
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;              // paths or built-in names
  std::map<std::string, std::string> digests;   // input -> digest
  std::optional<std::uint64_t> seed;
  std::string tool_version = kToolVersion;
  std::int64_t timestamp = 0;

  void add_input(const std::string& name, std::string_view contents) {
    inputs.push_back(name);
    digests[name] = digest(contents);
  }
};

inline ordered_json to_json(const RunManifest& m) {
  ordered_json j;
  j["record"] = "manifest";
  j["command"] = m.command;
  j["inputs"] = m.inputs;
  ordered_json d = ordered_json::object();
  for (const auto& [k, v] : m.digests) d[k] = v;
  j["digests"] = d;
  j["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json(nullptr);
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  return j;
}

inline ordered_json to_json(const LatencyBreakdown& b) {
  return {{"l_wait", b.l_wait}, {"l_run", b.l_run}, {"l_sig", b.l_sig}, {"l_rst", b.l_rst}, {"total", b.total}};
}

inline ordered_json to_json(const ResourceReport& r) {
  return {{"record", "resources"},   {"device", r.device},           {"lut_lut_core", r.lut_lut_core},
          {"lut_used", r.lut_used},  {"bram_lut_core", r.bram_lut_core}, {"bram_dsp_core", r.bram_dsp_core},
          {"bram_used", r.bram_used}, {"dsp_used", r.dsp_used},       {"lut_margin", r.lut_margin},
          {"bram_margin", r.bram_margin}, {"dsp_margin", r.dsp_margin}, {"feasible", r.feasible}};
}

inline ordered_json knobs_json(const ArchConfig& c) {
  ordered_json j;
  j["device"] = c.device;
  for (int k = 0; k < kHwKnobCount; ++k) j[std::string(kHwKnobNames[static_cast<std::size_t>(k)])] = knob_value(c, static_cast<HwKnob>(k));
  j["D_Lbuf_w"] = c.lut.D_Lbuf_w;
  j["N_reg_row_a"] = c.dsp.n_reg_row_a;
  return j;
}

inline ordered_json to_json(const LayerLatency& l) {
  return {{"record", "layer"},   {"layer", l.layer}, {"lut_cols", l.lut_cols},     {"dsp_cols", l.dsp_cols},
          {"ratio", l.ratio()},  {"lut", to_json(l.lut)}, {"dsp", to_json(l.dsp)}, {"cycles", l.cycles()}};
}

inline ordered_json to_json(const LayerSplit& s) {
  return {{"record", "split"},        {"layer", s.layer},         {"c_out", s.c_out},
          {"lut_cols", s.lut_cols},   {"ratio", s.ratio()},       {"forced_zero", s.forced_zero},
          {"B_a", s.bits.b_a},        {"B_wL", s.bits.b_wl},      {"lut_cycles", s.latency.lut.total},
          {"dsp_cycles", s.latency.dsp.total}, {"cycles", s.cycles()}};
}

inline ordered_json cycles_or_null(std::uint64_t c) { return c == kInfeasibleCycles ? ordered_json(nullptr) : ordered_json(c); }

inline std::vector<ordered_json> scan_json(int layer, const RatioScan& scan) {
  std::vector<ordered_json> out;
  for (int k = 0; k <= scan.c_out; ++k)
    out.push_back({{"record", "scan"},
                   {"layer", layer},
                   {"lut_cols", k},
                   {"ratio", static_cast<double>(k) / scan.c_out},
                   {"lut_cycles", cycles_or_null(scan.lut[static_cast<std::size_t>(k)])},
                   {"dsp_cycles", cycles_or_null(scan.dsp[static_cast<std::size_t>(scan.c_out - k)])},
                   {"cycles", cycles_or_null(scan.cycles(k))}});
  return out;
}

inline ordered_json to_json(const DesignPoint& p) {
  ordered_json bits = ordered_json::array();
  for (const auto& b : p.scheme.layers) bits.push_back({{"B_a", b.b_a}, {"B_wL", b.b_wl}});
  return {{"feasible", p.feasible},       {"reward", p.reward},   {"latency_ms", p.latency_ms},
          {"cycles", p.cycles},           {"accuracy", p.accuracy}, {"knobs", knobs_json(p.config)},
          {"bits", bits},                 {"ratios", p.ratios},   {"violations", p.violations}};
}

inline ordered_json episode_json(const EpisodeRecord& e) {
  ordered_json j = to_json(e.point);
  j["record"] = "episode";
  j["episode"] = e.episode;
  return j;
}

/// Per-layer chart rows for the best point.
inline std::vector<ordered_json> best_layers_json(const NetworkSpec& net, const DesignPoint& p) {
  std::vector<ordered_json> out;
  for (std::size_t i = 0; i < net.layers.size() && i < p.scheme.layers.size(); ++i)
    out.push_back({{"record", "best_layer"},
                   {"layer", net.layers[i].index},
                   {"B_a", p.scheme.layers[i].b_a},
                   {"B_wL", p.scheme.layers[i].b_wl},
                   {"ratio", p.ratios[i]}});
  return out;
}

/// Accumulates records and renders them one per line.
class Jsonl {
 public:
  void add(ordered_json j) { lines_.push_back(std::move(j)); }
  void add_all(const std::vector<ordered_json>& js) {
    for (const auto& j : js) lines_.push_back(j);
  }
  std::size_t size() const { return lines_.size(); }

  std::string str() const {
    std::string out;
    for (const auto& j : lines_) out += j.dump() + "\n";
    return out;
  }

 private:
  std::vector<ordered_json> lines_;
};

}  // namespace n3h::report
