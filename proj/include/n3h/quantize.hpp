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

// Uniform quantization, bit-plane decomposition and the hybrid per-filter
// scheme: filters computed on the DSP-core use 4-bit weights, filters on the
// LUT-core use B_wL bits, and filters whose low-bit quantization distorts
// their weight distribution most (by KL divergence) go to the wider core.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "n3h/common.hpp"
#include "n3h/workload.hpp"

namespace n3h {

inline constexpr int kDspWeightBits = 4;
inline constexpr int kEdgeLayerBits = 8;  // first and last layer
inline constexpr int kMinActBits = 2;
inline constexpr int kMaxActBits = 4;
inline constexpr int kMinLutWeightBits = 2;
inline constexpr int kMaxLutWeightBits = 8;

struct QuantParams {
  int n_bits = 8;
  double step = 1.0;

  std::int32_t lo() const { return -(std::int32_t{1} << (n_bits - 1)); }
  std::int32_t hi() const { return (std::int32_t{1} << (n_bits - 1)) - 1; }

  void validate() const {
    if (n_bits < 2 || n_bits > 8) throw input_error("quantizer bit-width must be in [2, 8], got " + std::to_string(n_bits));
    if (!(step > 0)) throw input_error("quantizer step must be positive");
  }
};

/// clip(round(x / s), lo, hi), rounding half away from zero.
inline std::int32_t quantize_uniform(double x, const QuantParams& p) {
  const std::int64_t q = round_half_away(x / p.step);
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(q, p.lo(), p.hi()));
}

inline double dequantize(std::int32_t q, const QuantParams& p) { return q * p.step; }

/// Step that maps the largest magnitude onto the top of the signed range.
inline double symmetric_step(double max_abs, int n_bits) {
  if (!(max_abs > 0)) return 1.0;
  return max_abs / static_cast<double>((1 << (n_bits - 1)) - 1);
}

// ---------------------------------------------------------------------------
// Per-layer bit-widths

struct LayerBits {
  int b_a = 4;                 // activations, shared by both cores
  int b_wl = 4;                // LUT-core weights
  int b_wd = kDspWeightBits;   // DSP-core weights, fixed

  friend bool operator==(const LayerBits&, const LayerBits&) = default;
};

struct QuantScheme {
  std::vector<LayerBits> layers;

  const LayerBits& at(int layer_index) const { return layers.at(static_cast<std::size_t>(layer_index - 1)); }
  friend bool operator==(const QuantScheme&, const QuantScheme&) = default;
};

/// Uniform scheme with the first/last layers pinned at 8/8.
inline QuantScheme uniform_scheme(const NetworkSpec& net, int b_a, int b_wl) {
  QuantScheme s;
  for (const auto& l : net.layers)
    s.layers.push_back(l.is_first_or_last ? LayerBits{kEdgeLayerBits, kEdgeLayerBits} : LayerBits{b_a, b_wl});
  return s;
}

inline void validate(const QuantScheme& scheme, const NetworkSpec& net) {
  if (scheme.layers.size() != net.layers.size())
    throw input_error("quant scheme covers " + std::to_string(scheme.layers.size()) + " layers, network has " +
                      std::to_string(net.layers.size()));
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& b = scheme.layers[i];
    const std::string where = "layer " + std::to_string(i + 1);
    if (b.b_wd != kDspWeightBits) throw input_error(where + ": DSP weight bits are fixed at 4");
    if (net.layers[i].is_first_or_last) {
      if (b.b_a != kEdgeLayerBits || b.b_wl != kEdgeLayerBits)
        throw input_error(where + ": first/last layer must be quantized at 8/8");
      continue;
    }
    if (b.b_a < kMinActBits || b.b_a > kMaxActBits) throw input_error(where + ": B_a must be in [2, 4]");
    if (b.b_wl < kMinLutWeightBits || b.b_wl > kMaxLutWeightBits) throw input_error(where + ": B_wL must be in [2, 8]");
  }
}

// ---------------------------------------------------------------------------
// Bit planes

struct BitPlaneMatrix {
  std::vector<Matrix<std::uint8_t>> planes;  // LSB first
  bool is_signed = false;
  std::size_t rows = 0;
  std::size_t cols = 0;

  int n_bits() const { return static_cast<int>(planes.size()); }

  /// Weight of plane j; the MSB of a two's-complement operand is negative.
  std::int64_t plane_weight(int j) const {
    const std::int64_t w = std::int64_t{1} << j;
    return (is_signed && j == n_bits() - 1) ? -w : w;
  }

  IntMatrix recompose() const {
    IntMatrix out(rows, cols, 0);
    for (int j = 0; j < n_bits(); ++j) {
      const auto& p = planes[static_cast<std::size_t>(j)];
      const std::int64_t w = plane_weight(j);
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += static_cast<std::int32_t>(w * p.data()[i]);
    }
    return out;
  }
};

struct IntRange {
  std::int64_t lo;
  std::int64_t hi;
};

inline IntRange representable_range(int n_bits, bool is_signed) {
  if (is_signed) return {-(std::int64_t{1} << (n_bits - 1)), (std::int64_t{1} << (n_bits - 1)) - 1};
  return {0, (std::int64_t{1} << n_bits) - 1};
}

inline void check_range(const IntMatrix& m, int n_bits, bool is_signed, std::string_view what = "matrix") {
  const auto r = representable_range(n_bits, is_signed);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto v = m(i, j);
      if (v < r.lo || v > r.hi)
        throw input_error(std::string(what) + " entry (" + std::to_string(i) + ", " + std::to_string(j) + ") = " +
                          std::to_string(v) + " does not fit " + std::to_string(n_bits) + "-bit " +
                          (is_signed ? "signed" : "unsigned"));
    }
}

inline BitPlaneMatrix bitplane_decompose(const IntMatrix& m, int n_bits, bool is_signed) {
  if (n_bits < 1 || n_bits > 30) throw input_error("bit-plane width must be in [1, 30]");
  check_range(m, n_bits, is_signed);
  BitPlaneMatrix out;
  out.is_signed = is_signed;
  out.rows = m.rows();
  out.cols = m.cols();
  out.planes.assign(static_cast<std::size_t>(n_bits), Matrix<std::uint8_t>(m.rows(), m.cols(), 0));
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto bits = static_cast<std::uint32_t>(m.data()[i]);  // two's complement
    for (int j = 0; j < n_bits; ++j) out.planes[static_cast<std::size_t>(j)].data()[i] = (bits >> j) & 1u;
  }
  return out;
}

// ---------------------------------------------------------------------------
// KL-divergence filter allocation

using FilterWeights = std::vector<std::vector<double>>;  // [filter][fan_in]

inline constexpr int kKlBins = 64;
inline constexpr double kKlSmoothing = 1e-6;

/// D_KL(P || Q) between 64-bin histograms of `original` and `quantized`,
/// both binned over the range of `original`.
inline double histogram_kl(std::span<const double> original, std::span<const double> quantized) {
  if (original.empty()) return 0.0;
  const auto [mn, mx] = std::minmax_element(original.begin(), original.end());
  const double lo = *mn;
  const double width = *mx - *mn;
  if (!(width > 0)) return 0.0;
  auto bin = [&](double v) {
    const auto b = static_cast<std::int64_t>(std::floor((v - lo) / width * kKlBins));
    return static_cast<std::size_t>(std::clamp<std::int64_t>(b, 0, kKlBins - 1));
  };
  std::vector<double> p(kKlBins, 0.0), q(kKlBins, 0.0);
  for (double v : original) p[bin(v)] += 1;
  for (double v : quantized) q[bin(v)] += 1;
  auto normalize = [](std::vector<double>& h) {
    double total = 0;
    for (auto& x : h) total += (x += kKlSmoothing);
    for (auto& x : h) x /= total;
  };
  normalize(p);
  normalize(q);
  double d = 0;
  for (int i = 0; i < kKlBins; ++i) d += p[i] * std::log(p[i] / q[i]);
  return d;
}

/// Divergence of a filter from its own n_bits fake-quantized copy.
inline double filter_divergence(std::span<const double> w, int n_bits) {
  double max_abs = 0;
  for (double v : w) max_abs = std::max(max_abs, std::abs(v));
  const QuantParams p{n_bits, symmetric_step(max_abs, n_bits)};
  std::vector<double> deq(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) deq[i] = dequantize(quantize_uniform(w[i], p), p);
  return histogram_kl(w, deq);
}

/// Filter ids are 0-based column indices into the layer's weight matrix.
struct FilterAssignment {
  int layer_index = 1;
  std::vector<int> lut_filters;  // ascending
  std::vector<int> dsp_filters;  // ascending
  double ratio = 0.0;

  int c_out() const { return static_cast<int>(lut_filters.size() + dsp_filters.size()); }

  friend bool operator==(const FilterAssignment&, const FilterAssignment&) = default;
};

inline int lut_filter_count(double ratio, int c_out) {
  return static_cast<int>(std::clamp<std::int64_t>(round_half_away(ratio * c_out), 0, c_out));
}

/// Throws unless the two sets partition {0, ..., c_out-1}.
inline void check_partition(const FilterAssignment& a, int c_out) {
  std::vector<int> seen(static_cast<std::size_t>(c_out), 0);
  auto mark = [&](const std::vector<int>& ids) {
    for (int id : ids) {
      if (id < 0 || id >= c_out) throw input_error("filter id " + std::to_string(id) + " outside layer");
      if (seen[static_cast<std::size_t>(id)]++) throw input_error("filter id " + std::to_string(id) + " assigned twice");
    }
  };
  mark(a.lut_filters);
  mark(a.dsp_filters);
  if (a.c_out() != c_out) throw input_error("assignment does not cover every filter");
}

/// Sort-and-take core of the allocation: filters ranked by divergence
/// (descending, ties to the lower id) and the top of the ranking goes to the
/// core with more weight bits. Equal widths send the top to the LUT-core.
inline FilterAssignment allocate_by_divergence(std::span<const double> divergence, double ratio, int b_wl, int b_wd,
                                               int layer_index = 1) {
  if (divergence.empty()) throw input_error("layer " + std::to_string(layer_index) + " has no filters");
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw input_error("split ratio must be in [0, 1]");
  const int c_out = static_cast<int>(divergence.size());
  const int n_lut = lut_filter_count(ratio, c_out);

  std::vector<int> order(static_cast<std::size_t>(c_out));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return divergence[static_cast<std::size_t>(a)] > divergence[static_cast<std::size_t>(b)]; });

  const int top = b_wl >= b_wd ? n_lut : c_out - n_lut;
  FilterAssignment out;
  out.layer_index = layer_index;
  out.ratio = ratio;
  for (int rank = 0; rank < c_out; ++rank) {
    const bool in_top = rank < top;
    const bool to_lut = (b_wl >= b_wd) ? in_top : !in_top;
    (to_lut ? out.lut_filters : out.dsp_filters).push_back(order[static_cast<std::size_t>(rank)]);
  }
  std::sort(out.lut_filters.begin(), out.lut_filters.end());
  std::sort(out.dsp_filters.begin(), out.dsp_filters.end());
  return out;
}

inline FilterAssignment kl_filter_alloc(const FilterWeights& weights, double ratio, int b_wl, int b_wd = kDspWeightBits,
                                        int layer_index = 1) {
  if (weights.empty()) throw input_error("layer " + std::to_string(layer_index) + " has no filters");
  const int low_bits = std::min(b_wl, b_wd);
  std::vector<double> div;
  div.reserve(weights.size());
  for (const auto& f : weights) {
    if (f.empty()) throw input_error("layer " + std::to_string(layer_index) + " has an empty filter");
    div.push_back(filter_divergence(f, low_bits));
  }
  return allocate_by_divergence(div, ratio, b_wl, b_wd, layer_index);
}

// ---------------------------------------------------------------------------
// Hybrid quantization of one layer

struct HybridQuantized {
  IntMatrix values;            // [filter][fan_in]
  std::vector<bool> on_lut;    // per filter
  QuantParams lut{8, 1.0};
  QuantParams dsp{kDspWeightBits, 1.0};

  const QuantParams& params_for(std::size_t filter) const { return on_lut[filter] ? lut : dsp; }

  /// depth x c_out operand for the GEMM cores.
  IntMatrix weight_matrix() const { return values.transposed(); }

  Matrix<double> dequantized() const {
    Matrix<double> out(values.rows(), values.cols());
    for (std::size_t f = 0; f < values.rows(); ++f)
      for (std::size_t k = 0; k < values.cols(); ++k) out(f, k) = dequantize(values(f, k), params_for(f));
    return out;
  }
};

inline HybridQuantized hybrid_quantize_layer(const FilterWeights& weights, const FilterAssignment& assignment,
                                             const LayerBits& bits, int layer_index) {
  if (assignment.layer_index != layer_index)
    throw input_error("assignment is for layer " + std::to_string(assignment.layer_index) + ", scheme for layer " +
                      std::to_string(layer_index));
  if (weights.empty()) throw input_error("layer " + std::to_string(layer_index) + " has no filters");
  const int c_out = static_cast<int>(weights.size());
  check_partition(assignment, c_out);
  const std::size_t fan_in = weights.front().size();
  for (const auto& f : weights)
    if (f.size() != fan_in) throw input_error("filters of layer " + std::to_string(layer_index) + " differ in size");

  HybridQuantized out;
  out.values = IntMatrix(static_cast<std::size_t>(c_out), fan_in, 0);
  out.on_lut.assign(static_cast<std::size_t>(c_out), false);
  for (int id : assignment.lut_filters) out.on_lut[static_cast<std::size_t>(id)] = true;

  auto group_max = [&](bool lut) {
    double m = 0;
    for (int f = 0; f < c_out; ++f)
      if (out.on_lut[static_cast<std::size_t>(f)] == lut)
        for (double v : weights[static_cast<std::size_t>(f)]) m = std::max(m, std::abs(v));
    return m;
  };
  out.lut = QuantParams{bits.b_wl, symmetric_step(group_max(true), bits.b_wl)};
  out.dsp = QuantParams{bits.b_wd, symmetric_step(group_max(false), bits.b_wd)};
  out.lut.validate();
  out.dsp.validate();

  for (std::size_t f = 0; f < weights.size(); ++f) {
    const auto& p = out.params_for(f);
    for (std::size_t k = 0; k < fan_in; ++k) out.values(f, k) = quantize_uniform(weights[f][k], p);
  }
  return out;
}

}  // namespace n3h
