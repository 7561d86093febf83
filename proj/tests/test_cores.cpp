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

#include <gtest/gtest.h>

#include <random>

#include "n3h/cores.hpp"
#include "test_util.hpp"

namespace n3h {
namespace {

using testing::oracle_gemm;
using testing::random_matrix;

TEST(LutGemm, WorkedExample) {
  const IntMatrix l{{2, 0}, {1, 3}};
  const IntMatrix r{{0, 1}, {1, 2}};
  const auto out = lut_gemm(l, r, {2, false}, {2, false}, {.M = 2, .N = 2, .K = 64});
  EXPECT_EQ(out, (AccMatrix{{0, 2}, {3, 7}}));
}

TEST(LutGemm, IdentityActivations) {
  std::mt19937_64 rng(1);
  const auto w = random_matrix(rng, 6, 5, 4, true);
  IntMatrix eye(6, 6, 0);
  for (std::size_t i = 0; i < 6; ++i) eye(i, i) = 1;
  EXPECT_EQ(lut_gemm(eye, w, {1, false}, {4, true}, {}), w.cast<std::int64_t>());
}

TEST(LutGemm, SeededOracle) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(1, 32), bits(2, 4), geo(1, 9), kk(1, 4);
  for (int t = 0; t < 1000; ++t) {
    const auto rows = static_cast<std::size_t>(dim(rng)), depth = static_cast<std::size_t>(dim(rng)),
               cols = static_cast<std::size_t>(dim(rng));
    const int ba = bits(rng), bw = bits(rng);
    const auto a = random_matrix(rng, rows, depth, ba, true);
    const auto w = random_matrix(rng, depth, cols, bw, true);
    const LutCoreGeometry g{.M = geo(rng), .N = geo(rng), .K = 64 * kk(rng)};
    ASSERT_EQ(lut_gemm(a, w, {ba, true}, {bw, true}, g), oracle_gemm(a, w)) << "case " << t;
  }
}

TEST(LutGemm, LongReductionCrossesWords) {
  std::mt19937_64 rng(3);
  const auto a = random_matrix(rng, 5, 300, 3, false);
  const auto w = random_matrix(rng, 300, 7, 6, true);
  EXPECT_EQ(lut_gemm(a, w, {3, false}, {6, true}, {.M = 2, .N = 3, .K = 64}), oracle_gemm(a, w));
}

TEST(LutGemm, GeometryDoesNotChangeValues) {
  std::mt19937_64 rng(4);
  const auto a = random_matrix(rng, 13, 150, 4, false);
  const auto w = random_matrix(rng, 150, 11, 8, true);
  const auto base = lut_gemm(a, w, {4, false}, {8, true}, {.M = 1, .N = 1, .K = 64});
  for (int m : {2, 5, 13, 50})
    for (int n : {3, 11, 40})
      for (int k : {64, 128, 256})
        EXPECT_EQ(lut_gemm(a, w, {4, false}, {8, true}, {.M = m, .N = n, .K = k, .D_Lbuf_a = 2048}), base);
}

TEST(LutGemm, Errors) {
  EXPECT_THROW(lut_gemm(IntMatrix(2, 3), IntMatrix(2, 3), {2, false}, {2, false}, {}), Error);
  EXPECT_THROW(lut_gemm(IntMatrix{{4}}, IntMatrix{{1}}, {2, false}, {2, false}, {}), Error);
  EXPECT_THROW(lut_gemm(IntMatrix{{1}}, IntMatrix{{2}}, {2, false}, {2, true}, {}), Error);
  EXPECT_THROW(lut_gemm(IntMatrix{{1}}, IntMatrix{{1}}, {2, false}, {2, true}, {.M = 0}), Error);
}

TEST(DspGemm, ZeroWeights) {
  std::mt19937_64 rng(5);
  const auto a = random_matrix(rng, 9, 20, 4, false);
  EXPECT_EQ(dsp_gemm(a, IntMatrix(20, 7, 0), {}), AccMatrix(9, 7, 0));
}

TEST(DspGemm, DotOfOnes) {
  EXPECT_EQ(dsp_gemm(IntMatrix(1, 16, 1), IntMatrix(16, 1, 1), {}), (AccMatrix{{16}}));
}

TEST(DspGemm, SeededOracle) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> dim(1, 32), rows_reg(1, 20), abits(1, 4), sgn(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const auto rows = static_cast<std::size_t>(dim(rng)), depth = static_cast<std::size_t>(dim(rng)),
               cols = static_cast<std::size_t>(dim(rng));
    const bool s = sgn(rng) == 1;
    const int ba = s ? std::max(2, abits(rng)) : abits(rng);
    const auto a = random_matrix(rng, rows, depth, ba, s);
    const auto w = random_matrix(rng, depth, cols, 4, true);
    const DspCoreGeometry g{.n_reg_row_a = rows_reg(rng)};
    ASSERT_EQ(dsp_gemm(a, w, g, {ba, s}), oracle_gemm(a, w)) << "case " << t;
  }
}

TEST(DspGemm, Errors) {
  EXPECT_THROW(dsp_gemm(IntMatrix{{1}}, IntMatrix{{8}}, {}), Error);
  EXPECT_THROW(dsp_gemm(IntMatrix{{16}}, IntMatrix{{1}}, {}), Error);
  EXPECT_THROW(dsp_gemm(IntMatrix{{1}}, IntMatrix{{1}}, {}, {8, false}), Error);
  EXPECT_THROW(dsp_gemm(IntMatrix(1, 2), IntMatrix(3, 1), {}), Error);
  DspCoreGeometry bad;
  bad.n_reg_col_w = 8;
  EXPECT_THROW(dsp_gemm(IntMatrix{{1}}, IntMatrix{{1}}, bad), Error);
}

struct HeteroCase {
  IntMatrix a;
  IntMatrix w;
  FilterAssignment assignment;
  LayerBits bits;
};

// Weight columns drawn at the bit-width of the core that owns them.
HeteroCase make_case(std::mt19937_64& rng, std::size_t rows, std::size_t depth, int c_out, double ratio, LayerBits bits) {
  std::vector<double> div(static_cast<std::size_t>(c_out));
  std::uniform_real_distribution<double> u;
  for (auto& d : div) d = u(rng);
  HeteroCase c{random_matrix(rng, rows, depth, bits.b_a, false), IntMatrix(depth, static_cast<std::size_t>(c_out)),
               allocate_by_divergence(div, ratio, bits.b_wl, bits.b_wd), bits};
  const auto lut_cols = random_matrix(rng, depth, static_cast<std::size_t>(c_out), bits.b_wl, true);
  const auto dsp_cols = random_matrix(rng, depth, static_cast<std::size_t>(c_out), 4, true);
  for (int id : c.assignment.lut_filters)
    for (std::size_t k = 0; k < depth; ++k) c.w(k, static_cast<std::size_t>(id)) = lut_cols(k, static_cast<std::size_t>(id));
  for (int id : c.assignment.dsp_filters)
    for (std::size_t k = 0; k < depth; ++k) c.w(k, static_cast<std::size_t>(id)) = dsp_cols(k, static_cast<std::size_t>(id));
  return c;
}

TEST(HeteroGemm, Boundaries) {
  std::mt19937_64 rng(6);
  const LutCoreGeometry lut{.M = 4, .N = 4, .K = 64};
  const DspCoreGeometry dsp{.n_reg_row_a = 4};
  auto c0 = make_case(rng, 10, 40, 12, 0.0, {3, 6});
  EXPECT_EQ(hetero_gemm(c0.a, c0.w, c0.assignment, c0.bits, lut, dsp), dsp_gemm(c0.a, c0.w, dsp, {3, false}));
  auto c1 = make_case(rng, 10, 40, 12, 1.0, {3, 6});
  EXPECT_EQ(hetero_gemm(c1.a, c1.w, c1.assignment, c1.bits, lut, dsp),
            lut_gemm(c1.a, c1.w, {3, false}, {6, true}, lut));
}

TEST(HeteroGemm, ThreeQuarterSplitOf256Filters) {
  std::mt19937_64 rng(7);
  auto c = make_case(rng, 9, 72, 256, 0.75, {4, 8});
  EXPECT_EQ(c.assignment.lut_filters.size(), 192u);
  EXPECT_EQ(c.assignment.dsp_filters.size(), 64u);
  const auto out = hetero_gemm(c.a, c.w, c.assignment, c.bits, {.M = 8, .N = 16, .K = 128}, {});
  EXPECT_EQ(out, oracle_gemm(c.a, c.w));
}

TEST(HeteroGemm, SeededOracleAndConcurrency) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> dim(1, 32), bits_a(2, 4), bits_w(2, 8);
  std::uniform_real_distribution<double> ratio;
  for (int t = 0; t < 300; ++t) {
    auto c = make_case(rng, static_cast<std::size_t>(dim(rng)), static_cast<std::size_t>(dim(rng)), dim(rng), ratio(rng),
                       {bits_a(rng), bits_w(rng)});
    const auto seq = hetero_gemm(c.a, c.w, c.assignment, c.bits, {.M = 3, .N = 5}, {.n_reg_row_a = 5});
    ASSERT_EQ(seq, oracle_gemm(c.a, c.w));
    ASSERT_EQ(hetero_gemm(c.a, c.w, c.assignment, c.bits, {.M = 3, .N = 5}, {.n_reg_row_a = 5}, true), seq);
  }
}

TEST(HeteroGemm, SetOrderDoesNotMatter) {
  std::mt19937_64 rng(9);
  auto c = make_case(rng, 6, 30, 20, 0.4, {2, 3});
  const auto base = hetero_gemm(c.a, c.w, c.assignment, c.bits, {}, {});
  auto shuffled = c.assignment;
  std::shuffle(shuffled.lut_filters.begin(), shuffled.lut_filters.end(), rng);
  std::shuffle(shuffled.dsp_filters.begin(), shuffled.dsp_filters.end(), rng);
  EXPECT_EQ(hetero_gemm(c.a, c.w, shuffled, c.bits, {}, {}), base);
}

TEST(HeteroGemm, WideActivationsRejectedOnDsp) {
  std::mt19937_64 rng(10);
  auto c = make_case(rng, 4, 8, 4, 0.5, {4, 8});
  EXPECT_THROW(hetero_gemm(c.a, c.w, c.assignment, {8, 8}, {}, {}), Error);
  c.assignment = allocate_by_divergence(std::vector<double>{1, 2, 3, 4}, 1.0, 8, 4);
  EXPECT_NO_THROW(hetero_gemm(c.a, c.w, c.assignment, {8, 8}, {}, {}));
}

}  // namespace
}  // namespace n3h
