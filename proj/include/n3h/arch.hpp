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

// Accelerator configuration: core geometries, per-layer bit-widths and split
// ratios, plus the per-device search ranges of the hardware knobs.
//
// Config file format:
//
//   arch device=XC7Z020 K=128 M=8 N=16 D_Lbuf_a=1024 [D_Lbuf_w=1024]
//        [N_reg_row_a=8] D_Dbuf_a=2048 D_Dbuf_w=1024
//   bits B_a=4 B_wL=4 [ratio=0.75]             # default for every layer
//   bits layer=3 B_a=2 B_wL=6 [ratio=0.5]      # per-layer override
//
// A layer without a ratio gets the latency-optimal split. First and last
// layers run at 8/8 unless a per-layer record says otherwise.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "n3h/common.hpp"
#include "n3h/cores.hpp"
#include "n3h/quantize.hpp"
#include "n3h/text_format.hpp"
#include "n3h/workload.hpp"

namespace n3h {

inline constexpr int kLutWeightBufferDepth = 1024;

struct LayerOverride {
  LayerBits bits;
  std::optional<double> ratio;

  friend bool operator==(const LayerOverride&, const LayerOverride&) = default;
};

struct ArchConfig {
  std::string device = "XC7Z020";
  LutCoreGeometry lut;
  DspCoreGeometry dsp;
  LayerBits default_bits{4, 4};
  std::optional<double> default_ratio;
  std::map<int, LayerOverride> layers;  // keyed by 1-based layer index

  LayerBits bits_for(const LayerSpec& l) const {
    if (auto it = layers.find(l.index); it != layers.end()) return it->second.bits;
    if (l.is_first_or_last) return LayerBits{kEdgeLayerBits, kEdgeLayerBits};
    return default_bits;
  }

  std::optional<double> ratio_for(const LayerSpec& l) const {
    if (auto it = layers.find(l.index); it != layers.end() && it->second.ratio) return it->second.ratio;
    return default_ratio;
  }

  QuantScheme scheme_for(const NetworkSpec& net) const {
    QuantScheme s;
    for (const auto& l : net.layers) s.layers.push_back(bits_for(l));
    validate(s, net);
    return s;
  }

  /// Copy with the given scheme and ratios written as per-layer records.
  ArchConfig with_layers(const QuantScheme& scheme, const std::vector<double>& ratios) const {
    ArchConfig out = *this;
    out.layers.clear();
    for (std::size_t i = 0; i < scheme.layers.size(); ++i)
      out.layers[static_cast<int>(i) + 1] =
          LayerOverride{scheme.layers[i], i < ratios.size() ? std::optional<double>(ratios[i]) : std::nullopt};
    return out;
  }

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

// ---------------------------------------------------------------------------
// Search ranges of the six hardware knobs

enum class HwKnob { K = 0, M, N, D_Lbuf_a, D_Dbuf_a, D_Dbuf_w };
inline constexpr int kHwKnobCount = 6;

inline constexpr std::array<std::string_view, kHwKnobCount> kHwKnobNames{"K", "M", "N", "D_Lbuf_a", "D_Dbuf_a", "D_Dbuf_w"};

struct KnobRange {
  int v_min = 1;
  int v_max = 1;
  int multiplier = 1;  // knob value = v * multiplier

  int lo() const { return v_min * multiplier; }
  int hi() const { return v_max * multiplier; }
  bool contains(int value) const { return value % multiplier == 0 && value >= lo() && value <= hi(); }
};

struct ActionRangeTable {
  std::string device;
  std::array<KnobRange, kHwKnobCount> hw;
  int b_a_min = kMinActBits, b_a_max = kMaxActBits;
  int b_wl_min = kMinLutWeightBits, b_wl_max = kMaxLutWeightBits;

  const KnobRange& operator[](HwKnob k) const { return hw[static_cast<std::size_t>(k)]; }
};

/// XC7Z020 ranges; everything else (XC7Z045 and custom devices) uses the
/// larger table.
inline ActionRangeTable action_ranges(std::string_view device) {
  ActionRangeTable t;
  t.device = std::string(device);
  if (device == "XC7Z020")
    t.hw = {KnobRange{1, 4, 64}, {1, 50, 1}, {1, 50, 1}, {1, 50, 1024}, {1, 25, 1024}, {1, 4, 1024}};
  else
    t.hw = {KnobRange{1, 4, 64}, {1, 252, 1}, {1, 252, 1}, {1, 252, 1024}, {1, 126, 1024}, {1, 16, 1024}};
  return t;
}

inline int knob_value(const ArchConfig& c, HwKnob k) {
  switch (k) {
    case HwKnob::K: return c.lut.K;
    case HwKnob::M: return c.lut.M;
    case HwKnob::N: return c.lut.N;
    case HwKnob::D_Lbuf_a: return c.lut.D_Lbuf_a;
    case HwKnob::D_Dbuf_a: return c.dsp.D_Dbuf_a;
    case HwKnob::D_Dbuf_w: return c.dsp.D_Dbuf_w;
  }
  return 0;
}

inline void set_knob(ArchConfig& c, HwKnob k, int v) {
  switch (k) {
    case HwKnob::K: c.lut.K = v; break;
    case HwKnob::M: c.lut.M = v; break;
    case HwKnob::N: c.lut.N = v; break;
    case HwKnob::D_Lbuf_a: c.lut.D_Lbuf_a = v; break;
    case HwKnob::D_Dbuf_a: c.dsp.D_Dbuf_a = v; break;
    case HwKnob::D_Dbuf_w: c.dsp.D_Dbuf_w = v; break;
  }
}

/// Structural checks; throws input errors.
inline void validate(const ArchConfig& c) {
  c.lut.validate();
  c.dsp.validate();
  if (c.lut.D_Lbuf_w != kLutWeightBufferDepth) throw input_error("D_Lbuf_w is fixed at 1024");
  if (c.default_ratio && !(*c.default_ratio >= 0 && *c.default_ratio <= 1)) throw input_error("ratio must be in [0, 1]");
  for (const auto& [idx, o] : c.layers)
    if (o.ratio && !(*o.ratio >= 0 && *o.ratio <= 1))
      throw input_error("layer " + std::to_string(idx) + ": ratio must be in [0, 1]");
}

/// Hardware knobs outside the device search range, one message each. Some
/// reported configurations sit outside the range (K=512), so this is
/// advisory outside exploration.
inline std::vector<std::string> range_violations(const ArchConfig& c) {
  std::vector<std::string> out;
  const auto ranges = action_ranges(c.device);
  for (int i = 0; i < kHwKnobCount; ++i) {
    const auto k = static_cast<HwKnob>(i);
    const auto& r = ranges[k];
    const int v = knob_value(c, k);
    if (!r.contains(v))
      out.push_back(std::string(kHwKnobNames[static_cast<std::size_t>(i)]) + "=" + std::to_string(v) + " outside " +
                    std::to_string(r.lo()) + ".." + std::to_string(r.hi()) +
                    (r.multiplier > 1 ? " step " + std::to_string(r.multiplier) : ""));
  }
  return out;
}

inline ArchConfig parse_arch_config(std::string_view text) {
  ArchConfig c;
  bool have_arch = false, have_default = false;
  for (const auto& rec : text::parse(text)) {
    if (rec.tag == "arch") {
      if (have_arch) throw input_error(rec.where() + ": duplicate arch record");
      have_arch = true;
      c.device = std::string(rec.require("device"));
      c.lut.K = static_cast<int>(rec.get_int("K"));
      c.lut.M = static_cast<int>(rec.get_int("M"));
      c.lut.N = static_cast<int>(rec.get_int("N"));
      c.lut.D_Lbuf_a = static_cast<int>(rec.get_int("D_Lbuf_a"));
      c.lut.D_Lbuf_w = static_cast<int>(rec.get_int_or("D_Lbuf_w", kLutWeightBufferDepth));
      c.dsp.n_reg_row_a = static_cast<int>(rec.get_int_or("N_reg_row_a", 8));
      c.dsp.D_Dbuf_a = static_cast<int>(rec.get_int("D_Dbuf_a"));
      c.dsp.D_Dbuf_w = static_cast<int>(rec.get_int("D_Dbuf_w"));
    } else if (rec.tag == "bits") {
      LayerBits b{static_cast<int>(rec.get_int("B_a")), static_cast<int>(rec.get_int("B_wL"))};
      std::optional<double> ratio;
      if (rec.has("ratio")) ratio = rec.get_double("ratio");
      if (rec.has("layer")) {
        const int idx = static_cast<int>(rec.get_int("layer"));
        if (idx < 1) throw input_error(rec.where() + ": layer must be >= 1");
        if (c.layers.count(idx)) throw input_error(rec.where() + ": duplicate bits record for layer " + std::to_string(idx));
        c.layers[idx] = LayerOverride{b, ratio};
      } else {
        if (have_default) throw input_error(rec.where() + ": duplicate default bits record");
        have_default = true;
        c.default_bits = b;
        c.default_ratio = ratio;
      }
    } else {
      throw input_error(rec.where() + ": unknown record tag '" + rec.tag + "'");
    }
  }
  if (!have_arch) throw input_error("config has no 'arch' record");
  validate(c);
  return c;
}

inline std::string to_config_text(const ArchConfig& c) {
  std::string out = text::RecordWriter("arch")
                        .add("device", c.device)
                        .add("K", c.lut.K)
                        .add("M", c.lut.M)
                        .add("N", c.lut.N)
                        .add("D_Lbuf_a", c.lut.D_Lbuf_a)
                        .add("D_Lbuf_w", c.lut.D_Lbuf_w)
                        .add("N_reg_row_a", c.dsp.n_reg_row_a)
                        .add("D_Dbuf_a", c.dsp.D_Dbuf_a)
                        .add("D_Dbuf_w", c.dsp.D_Dbuf_w)
                        .str() +
                    "\n";
  auto bits = [](text::RecordWriter w, const LayerBits& b, const std::optional<double>& r) {
    w.add("B_a", b.b_a).add("B_wL", b.b_wl);
    if (r) w.add("ratio", *r);
    return w.str() + "\n";
  };
  out += bits(text::RecordWriter("bits"), c.default_bits, c.default_ratio);
  for (const auto& [idx, o] : c.layers) {
    text::RecordWriter w("bits");
    w.add("layer", idx);
    out += bits(std::move(w), o.bits, o.ratio);
  }
  return out;
}

}  // namespace n3h
