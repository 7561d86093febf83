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

// Per-layer workload split between the LUT-core and the DSP-core.
//
// A core's latency depends on its column share only through the number of
// column tiles and never decreases as the share grows. The layer latency
// max(L_LUT(k), L_DSP(c_out - k)) is therefore smallest where the two
// staircases cross, which optimal_ratio finds by bisection. ratio_scan
// simulates every k and serves as the exhaustive reference.

#pragma once

#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <vector>

#include "n3h/arch.hpp"
#include "n3h/sched.hpp"
#include "n3h/workload.hpp"

namespace n3h {

inline constexpr std::uint64_t kInfeasibleCycles = std::numeric_limits<std::uint64_t>::max();

/// Latency of each side for every column count; kInfeasibleCycles where the
/// core cannot run the share.
struct RatioScan {
  int c_out = 0;
  std::vector<std::uint64_t> lut;  // lut[k]: k columns on the LUT-core
  std::vector<std::uint64_t> dsp;  // dsp[j]: j columns on the DSP-core

  /// Layer latency with k filters on the LUT-core.
  std::uint64_t cycles(int k) const {
    return std::max(lut[static_cast<std::size_t>(k)], dsp[static_cast<std::size_t>(c_out - k)]);
  }
};

namespace detail {

/// Side latency by column count, simulated once per tile count.
class SideLatency {
 public:
  SideLatency(const LayerSpec& layer, const ArchConfig& cfg, const LayerBits& bits, CoreKind core, const Tunables& t)
      : shape_(im2col_dims(layer)), cfg_(cfg), bits_(bits), core_(core), t_(t), layer_(layer.index),
        width_(core == CoreKind::Lut ? cfg.lut.N : cfg.dsp.n_reg_col_w),
        disabled_(core == CoreKind::Dsp && bits.b_a > kDspOperandBits) {}

  std::uint64_t operator()(int cols) {
    if (cols == 0) return 0;
    if (disabled_) return kInfeasibleCycles;
    const int tiles = ceil_div(cols, width_);
    if (auto it = memo_.find(tiles); it != memo_.end()) return it->second;
    std::uint64_t v = kInfeasibleCycles;
    try {
      v = core_latency({shape_.rows, shape_.depth, cols}, cfg_, bits_, core_, t_, layer_).total;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
    }
    memo_.emplace(tiles, v);
    return v;
  }

 private:
  GemmShape shape_;
  const ArchConfig& cfg_;
  LayerBits bits_;
  CoreKind core_;
  const Tunables& t_;
  int layer_;
  int width_;
  bool disabled_;
  std::map<int, std::uint64_t> memo_;
};

}  // namespace detail

inline RatioScan ratio_scan(const LayerSpec& layer, const ArchConfig& cfg, const LayerBits& bits, const Tunables& t = {}) {
  detail::SideLatency lut(layer, cfg, bits, CoreKind::Lut, t);
  detail::SideLatency dsp(layer, cfg, bits, CoreKind::Dsp, t);
  RatioScan s;
  s.c_out = layer.c_out;
  for (int k = 0; k <= layer.c_out; ++k) {
    s.lut.push_back(lut(k));
    s.dsp.push_back(dsp(k));
  }
  return s;
}

/// Argmin of scan.cycles(k); ties go to the larger k. Throws an infeasible
/// error if no k is runnable.
inline int best_lut_cols(const RatioScan& scan) {
  int best = -1;
  std::uint64_t best_cycles = kInfeasibleCycles;
  for (int k = 0; k <= scan.c_out; ++k) {
    const auto c = scan.cycles(k);
    if (c != kInfeasibleCycles && c <= best_cycles) {
      best = k;
      best_cycles = c;
    }
  }
  if (best < 0) throw infeasible_error("no split of " + std::to_string(scan.c_out) + " filters fits either core");
  return best;
}

/// Same answer as best_lut_cols for non-decreasing `lut(k)` and `dsp(j)`,
/// using O(log c_out) evaluations of each.
template <class LutFn, class DspFn>
int crossing_lut_cols(int c_out, LutFn&& lut, DspFn&& dsp) {
  int lo = 0, hi = c_out;  // smallest k with lut(k) >= dsp(c_out - k)
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (lut(mid) >= dsp(c_out - mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  const int cross = lo;
  const std::uint64_t right = lut(cross);
  const std::uint64_t left = cross > 0 ? dsp(c_out - cross + 1) : kInfeasibleCycles;
  if (right != kInfeasibleCycles && (cross == 0 || right <= left)) {
    lo = cross;
    hi = c_out;  // largest k with lut(k) <= right
    while (lo < hi) {
      const int mid = lo + (hi - lo + 1) / 2;
      if (lut(mid) <= right)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }
  if (left != kInfeasibleCycles) return cross - 1;
  throw infeasible_error("no split of " + std::to_string(c_out) + " filters fits either core");
}


struct LayerSplit {
  int layer = 0;
  int c_out = 0;
  int lut_cols = 0;
  bool forced_zero = false;  // depthwise layer kept wholly on the DSP-core
  LayerBits bits;
  LayerLatency latency;

  double ratio() const { return static_cast<double>(lut_cols) / c_out; }
  std::uint64_t cycles() const { return latency.cycles(); }
};

inline LayerSplit optimal_ratio(const LayerSpec& layer, const ArchConfig& cfg, const LayerBits& bits, const Tunables& t = {}) {
  detail::SideLatency lut(layer, cfg, bits, CoreKind::Lut, t);
  detail::SideLatency dsp(layer, cfg, bits, CoreKind::Dsp, t);
  LayerSplit out;
  out.layer = layer.index;
  out.c_out = layer.c_out;
  out.bits = bits;
  out.lut_cols = bits.b_a > kDspOperandBits ? layer.c_out : crossing_lut_cols(layer.c_out, lut, dsp);
  out.latency = layer_latency_cols(layer, cfg, bits, out.lut_cols, t);
  return out;
}

struct SplitPlan {
  std::vector<LayerSplit> layers;
  std::uint64_t cycles = 0;

  double ms() const { return cycles_to_ms(cycles); }
  std::vector<double> ratios() const {
    std::vector<double> r;
    for (const auto& l : layers) r.push_back(l.ratio());
    return r;
  }
};

/// Depthwise layers also try the all-DSP split and keep it when it is no
/// slower.
inline LayerSplit plan_layer(const LayerSpec& layer, const ArchConfig& cfg, const LayerBits& bits, const Tunables& t = {}) {
  auto best = optimal_ratio(layer, cfg, bits, t);
  if (layer.is_depthwise && best.lut_cols != 0 && bits.b_a <= kDspOperandBits) {
    try {
      auto zero = layer_latency_cols(layer, cfg, bits, 0, t);
      if (zero.cycles() <= best.cycles()) {
        best.lut_cols = 0;
        best.latency = zero;
        best.forced_zero = true;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
    }
  } else if (layer.is_depthwise && best.lut_cols == 0) {
    best.forced_zero = true;
  }
  return best;
}

inline SplitPlan plan_network(const NetworkSpec& net, const ArchConfig& cfg, const QuantScheme& scheme, const Tunables& t = {},
                              bool concurrent = false) {
  validate(cfg);
  validate(scheme, net);
  SplitPlan plan;
  plan.layers.resize(net.layers.size());
  if (concurrent) {
    std::vector<std::future<LayerSplit>> jobs;
    for (std::size_t i = 0; i < net.layers.size(); ++i)
      jobs.push_back(std::async(std::launch::async, [&, i] { return plan_layer(net.layers[i], cfg, scheme.layers[i], t); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) plan.layers[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < net.layers.size(); ++i) plan.layers[i] = plan_layer(net.layers[i], cfg, scheme.layers[i], t);
  }
  for (const auto& l : plan.layers) plan.cycles += l.cycles();
  return plan;
}

/// Config with per-layer bits and the plan's ratios written out.
inline ArchConfig apply_plan(const ArchConfig& cfg, const QuantScheme& scheme, const SplitPlan& plan) {
  return cfg.with_layers(scheme, plan.ratios());
}

/// Fills every layer the config leaves without a ratio with its optimal
/// split. Layers that already have one keep it.
inline ArchConfig complete_ratios(const NetworkSpec& net, const ArchConfig& cfg, const Tunables& t = {}) {
  validate(cfg);
  const auto scheme = cfg.scheme_for(net);
  std::vector<double> ratios;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    if (const auto r = cfg.ratio_for(l))
      ratios.push_back(*r);
    else
      ratios.push_back(plan_layer(l, cfg, scheme.layers[i], t).ratio());
  }
  return cfg.with_layers(scheme, ratios);
}

}  // namespace n3h
