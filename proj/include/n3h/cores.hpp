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

// Value-exact models of the two compute cores.
//
// The LUT-core multiplies bit planes: each operand is split into binary
// matrices, every (activation plane, weight plane) pair is multiplied with
// AND + popcount over 64-bit words, and the partial products are summed with
// weight 2^(i+j). The DSP-core is an ordinary tiled integer GEMM over
// N_reg_row_a x 16 activation blocks and 16 x 16 weight blocks.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <future>
#include <string>
#include <vector>

#include "n3h/common.hpp"
#include "n3h/quantize.hpp"

namespace n3h {

struct LutCoreGeometry {
  int M = 8;
  int N = 8;
  int K = 64;
  int D_Lbuf_a = 1024;
  int D_Lbuf_w = 1024;

  void validate() const {
    if (M < 1 || N < 1 || K < 1 || D_Lbuf_a < 1 || D_Lbuf_w < 1)
      throw input_error("LUT-core geometry fields must be >= 1");
  }
  friend bool operator==(const LutCoreGeometry&, const LutCoreGeometry&) = default;
};

inline constexpr int kDspRegCols = 16;

struct DspCoreGeometry {
  int n_reg_row_a = 8;
  int n_reg_col_a = kDspRegCols;
  int n_reg_col_w = kDspRegCols;
  int D_Dbuf_a = 1024;
  int D_Dbuf_w = 1024;

  void validate() const {
    if (n_reg_row_a < 1) throw input_error("N_reg_row_a must be >= 1");
    if (n_reg_col_a != kDspRegCols || n_reg_col_w != kDspRegCols)
      throw input_error("DSP-core register columns are fixed at 16");
    if (D_Dbuf_a < 1 || D_Dbuf_w < 1) throw input_error("DSP-core buffer depths must be >= 1");
  }
  friend bool operator==(const DspCoreGeometry&, const DspCoreGeometry&) = default;
};

struct OperandFormat {
  int bits = 4;
  bool is_signed = false;
};

namespace detail {

inline void check_gemm_shapes(const IntMatrix& a, const IntMatrix& w) {
  if (a.cols() != w.rows())
    throw input_error("gemm shape mismatch: A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                      ", W is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
}

/// Bit plane j of `m` packed along `depth`: one word vector per line
/// (row of A or column of W).
struct PackedPlanes {
  std::size_t words = 0;
  // [plane][line][word]
  std::vector<std::vector<std::uint64_t>> bits;

  const std::uint64_t* line(int plane, std::size_t l) const { return bits[static_cast<std::size_t>(plane)].data() + l * words; }
};

inline PackedPlanes pack(const BitPlaneMatrix& p, bool along_rows) {
  const std::size_t lines = along_rows ? p.rows : p.cols;
  const std::size_t depth = along_rows ? p.cols : p.rows;
  PackedPlanes out;
  out.words = ceil_div<std::size_t>(depth, 64);
  out.bits.assign(p.planes.size(), std::vector<std::uint64_t>(lines * out.words, 0));
  for (std::size_t j = 0; j < p.planes.size(); ++j)
    for (std::size_t l = 0; l < lines; ++l)
      for (std::size_t d = 0; d < depth; ++d) {
        const auto v = along_rows ? p.planes[j](l, d) : p.planes[j](d, l);
        if (v) out.bits[j][l * out.words + d / 64] |= std::uint64_t{1} << (d % 64);
      }
  return out;
}

}  // namespace detail

/// Bit-serial GEMM. Tiles M output rows x N output columns, streaming the
/// reduction K bits at a time. Output equals reference_gemm(a, w).
inline AccMatrix lut_gemm(const IntMatrix& a, const IntMatrix& w, OperandFormat fa, OperandFormat fw,
                          const LutCoreGeometry& g) {
  g.validate();
  detail::check_gemm_shapes(a, w);
  check_range(a, fa.bits, fa.is_signed, "activation");
  check_range(w, fw.bits, fw.is_signed, "weight");
  const auto pa = bitplane_decompose(a, fa.bits, fa.is_signed);
  const auto pw = bitplane_decompose(w, fw.bits, fw.is_signed);
  const auto packed_a = detail::pack(pa, true);
  const auto packed_w = detail::pack(pw, false);

  const std::size_t rows = a.rows(), cols = w.cols(), words = packed_a.words;
  const std::size_t chunk = std::max<std::size_t>(1, ceil_div<std::size_t>(static_cast<std::size_t>(g.K), 64));
  AccMatrix out(rows, cols, 0);
  for (std::size_t r0 = 0; r0 < rows; r0 += static_cast<std::size_t>(g.M))
    for (std::size_t c0 = 0; c0 < cols; c0 += static_cast<std::size_t>(g.N))
      for (std::size_t k0 = 0; k0 < words; k0 += chunk) {
        const std::size_t r1 = std::min(rows, r0 + static_cast<std::size_t>(g.M));
        const std::size_t c1 = std::min(cols, c0 + static_cast<std::size_t>(g.N));
        const std::size_t k1 = std::min(words, k0 + chunk);
        for (int i = 0; i < pa.n_bits(); ++i)
          for (int j = 0; j < pw.n_bits(); ++j) {
            const std::int64_t weight = pa.plane_weight(i) * pw.plane_weight(j);
            for (std::size_t r = r0; r < r1; ++r) {
              const auto* ar = packed_a.line(i, r);
              for (std::size_t c = c0; c < c1; ++c) {
                const auto* wc = packed_w.line(j, c);
                std::int64_t ones = 0;
                for (std::size_t k = k0; k < k1; ++k) ones += std::popcount(ar[k] & wc[k]);
                out(r, c) += weight * ones;
              }
            }
          }
      }
  return out;
}

inline constexpr int kDspOperandBits = 4;

/// Tiled bit-parallel GEMM of the DSP-core. Activations of fewer than four
/// bits are zero-extended; weights are 4-bit signed.
inline AccMatrix dsp_gemm(const IntMatrix& a, const IntMatrix& w, const DspCoreGeometry& g,
                          OperandFormat fa = {kDspOperandBits, false}) {
  g.validate();
  detail::check_gemm_shapes(a, w);
  if (fa.bits > kDspOperandBits)
    throw input_error("DSP-core cannot run " + std::to_string(fa.bits) + "-bit activations (max 4)");
  check_range(a, kDspOperandBits, fa.is_signed, "DSP activation");
  check_range(w, kDspOperandBits, true, "DSP weight");

  const std::size_t rows = a.rows(), depth = a.cols(), cols = w.cols();
  const auto tr = static_cast<std::size_t>(g.n_reg_row_a);
  const auto tk = static_cast<std::size_t>(g.n_reg_col_a);
  const auto tc = static_cast<std::size_t>(g.n_reg_col_w);
  AccMatrix out(rows, cols, 0);
  for (std::size_t r0 = 0; r0 < rows; r0 += tr)
    for (std::size_t c0 = 0; c0 < cols; c0 += tc)
      for (std::size_t k0 = 0; k0 < depth; k0 += tk) {
        const std::size_t r1 = std::min(rows, r0 + tr), c1 = std::min(cols, c0 + tc), k1 = std::min(depth, k0 + tk);
        for (std::size_t r = r0; r < r1; ++r)
          for (std::size_t c = c0; c < c1; ++c) {
            std::int64_t acc = 0;
            for (std::size_t k = k0; k < k1; ++k) acc += static_cast<std::int64_t>(a(r, k)) * w(k, c);
            out(r, c) += acc;
          }
      }
  return out;
}

namespace detail {

inline IntMatrix select_columns(const IntMatrix& w, const std::vector<int>& ids) {
  IntMatrix out(w.rows(), ids.size());
  for (std::size_t k = 0; k < w.rows(); ++k)
    for (std::size_t j = 0; j < ids.size(); ++j) out(k, j) = w(k, static_cast<std::size_t>(ids[j]));
  return out;
}

inline void scatter_columns(AccMatrix& out, const AccMatrix& part, const std::vector<int>& ids) {
  for (std::size_t r = 0; r < part.rows(); ++r)
    for (std::size_t j = 0; j < ids.size(); ++j) out(r, static_cast<std::size_t>(ids[j])) = part(r, j);
}

}  // namespace detail

/// Splits the filters (columns of `w`) between the two cores and interleaves
/// the results back into filter order. `w` is depth x c_out.
inline AccMatrix hetero_gemm(const IntMatrix& a, const IntMatrix& w, const FilterAssignment& assignment,
                             const LayerBits& bits, const LutCoreGeometry& lut, const DspCoreGeometry& dsp,
                             bool concurrent = false, bool activations_signed = false) {
  detail::check_gemm_shapes(a, w);
  check_partition(assignment, static_cast<int>(w.cols()));
  const OperandFormat fa{bits.b_a, activations_signed};

  auto run_lut = [&] {
    if (assignment.lut_filters.empty()) return AccMatrix(a.rows(), 0);
    return lut_gemm(a, detail::select_columns(w, assignment.lut_filters), fa, {bits.b_wl, true}, lut);
  };
  auto run_dsp = [&] {
    if (assignment.dsp_filters.empty()) return AccMatrix(a.rows(), 0);
    return dsp_gemm(a, detail::select_columns(w, assignment.dsp_filters), dsp, fa);
  };

  AccMatrix lut_part, dsp_part;
  if (concurrent) {
    auto fut = std::async(std::launch::async, run_dsp);
    lut_part = run_lut();
    dsp_part = fut.get();
  } else {
    lut_part = run_lut();
    dsp_part = run_dsp();
  }
  AccMatrix out(a.rows(), w.cols(), 0);
  detail::scatter_columns(out, lut_part, assignment.lut_filters);
  detail::scatter_columns(out, dsp_part, assignment.dsp_filters);
  return out;
}

}  // namespace n3h
