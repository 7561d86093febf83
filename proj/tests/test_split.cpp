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

#include "n3h/split.hpp"

namespace n3h {
namespace {

RatioScan table(std::vector<std::uint64_t> lut, std::vector<std::uint64_t> dsp) {
  RatioScan s;
  s.c_out = static_cast<int>(lut.size()) - 1;
  s.lut = std::move(lut);
  s.dsp = std::move(dsp);
  // Both searches must agree on every monotone table.
  const int exhaustive = [&] {
    try {
      return best_lut_cols(s);
    } catch (const Error&) {
      return -1;
    }
  }();
  const int bisected = [&] {
    try {
      return crossing_lut_cols(s.c_out, [&](int k) { return s.lut[static_cast<std::size_t>(k)]; },
                               [&](int j) { return s.dsp[static_cast<std::size_t>(j)]; });
    } catch (const Error&) {
      return -1;
    }
  }();
  EXPECT_EQ(exhaustive, bisected);
  return s;
}

TEST(BestLutCols, HandTables) {
  // k:      0   1   2   3   4
  // max: 48, 36, 24, 30, 40
  EXPECT_EQ(best_lut_cols(table({0, 10, 20, 30, 40}, {0, 12, 24, 36, 48})), 2);
  // max: 40, 30, 10, 20, 30
  EXPECT_EQ(best_lut_cols(table({0, 5, 10, 20, 30}, {0, 10, 10, 30, 40})), 2);
  // every candidate ties: larger share wins
  EXPECT_EQ(best_lut_cols(table({0, 10, 10, 10, 10}, {0, 10, 10, 10, 10})), 4);
  // max: 9, 9, 7, 7, 8: tie between 2 and 3 goes to 3
  EXPECT_EQ(best_lut_cols(table({0, 1, 2, 7, 8}, {0, 1, 7, 9, 9})), 3);
  // all-DSP only
  EXPECT_EQ(best_lut_cols(table({0, 1, 1, 1, 50}, {0, 1, 1, 1, 1})), 3);
}

TEST(BestLutCols, InfeasibleEntries) {
  const auto X = kInfeasibleCycles;
  EXPECT_EQ(best_lut_cols(table({0, X, X}, {0, 5, 9})), 0);
  EXPECT_EQ(best_lut_cols(table({0, 5, 9}, {0, X, X})), 2);
  EXPECT_THROW(best_lut_cols(table({0, X, X}, {0, X, X})), Error);
}

TEST(BestLutCols, SymmetricCostsSplitEvenly) {
  for (int c = 1; c <= 40; ++c) {
    std::vector<std::uint64_t> side;
    for (int k = 0; k <= c; ++k) side.push_back(static_cast<std::uint64_t>(7 * k));
    const int k = best_lut_cols(table(side, side));
    EXPECT_LE(std::abs(2 * k - c), 2) << c;
  }
}

/// Independent oracle: simulate every split from scratch.
std::vector<std::uint64_t> full_sweep(const LayerSpec& l, const ArchConfig& cfg, const LayerBits& bits) {
  std::vector<std::uint64_t> out;
  for (int k = 0; k <= l.c_out; ++k) {
    try {
      out.push_back(layer_latency_cols(l, cfg, bits, k).cycles());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
      out.push_back(kInfeasibleCycles);
    }
  }
  return out;
}

void expect_optimal(const LayerSpec& l, const ArchConfig& cfg, const LayerBits& bits) {
  const auto sweep = full_sweep(l, cfg, bits);
  const auto s = optimal_ratio(l, cfg, bits);
  const auto k = static_cast<std::size_t>(s.lut_cols);
  EXPECT_EQ(s.cycles(), sweep[k]);
  for (std::size_t j = 0; j < sweep.size(); ++j) {
    EXPECT_LE(sweep[k], sweep[j]) << "layer " << l.index << " k=" << k << " j=" << j;
    if (j > k) {
      EXPECT_LT(sweep[k], sweep[j]);  // ties go to the larger share
    }
  }
  EXPECT_EQ(s.cycles(), std::max(s.latency.lut.total, s.latency.dsp.total));
  EXPECT_DOUBLE_EQ(s.ratio() * l.c_out, s.lut_cols);
  const auto scan = ratio_scan(l, cfg, bits);
  for (int j = 0; j <= l.c_out; ++j) EXPECT_EQ(scan.cycles(j), sweep[static_cast<std::size_t>(j)]);
}

TEST(OptimalRatio, SyntheticSmallEveryLayer) {
  const auto net = builtin_network("synthetic-small");
  ArchConfig cfg;
  for (const auto& l : net.layers) expect_optimal(l, cfg, cfg.bits_for(l));
  cfg.lut = {.M = 3, .N = 5, .K = 128, .D_Lbuf_a = 4096};
  for (const auto& l : net.layers) expect_optimal(l, cfg, l.is_first_or_last ? cfg.bits_for(l) : LayerBits{2, 7});
}

TEST(OptimalRatio, RandomResNetLayers) {
  const auto net = builtin_network("resnet18");
  std::mt19937_64 rng(5);
  ArchConfig cfg;
  cfg.lut = {.M = 8, .N = 16, .K = 128};
  cfg.dsp.D_Dbuf_a = 2048;
  for (int t = 0; t < 5; ++t) {
    const auto& l = net.layers[std::uniform_int_distribution<std::size_t>(1, net.layers.size() - 2)(rng)];
    expect_optimal(l, cfg, LayerBits{std::uniform_int_distribution<int>(2, 4)(rng), std::uniform_int_distribution<int>(2, 8)(rng)});
  }
}

TEST(OptimalRatio, BisectionMatchesExhaustiveSweep) {
  std::mt19937_64 rng(6);
  std::vector<LayerSpec> layers;
  for (const auto& name : builtin_network_names())
    for (const auto& l : builtin_network(name).layers) layers.push_back(l);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int t = 0; t < 200; ++t) {
    const auto& l = layers[static_cast<std::size_t>(pick(0, static_cast<int>(layers.size()) - 1))];
    ArchConfig cfg;
    cfg.lut = {.M = pick(1, 50), .N = pick(4, 50), .K = 64 * pick(1, 4), .D_Lbuf_a = 1024 * pick(1, 50)};
    cfg.dsp.n_reg_row_a = pick(1, 16);
    cfg.dsp.D_Dbuf_a = 1024 * pick(1, 25);
    cfg.dsp.D_Dbuf_w = 1024 * pick(1, 4);
    const LayerBits bits = l.is_first_or_last ? LayerBits{8, 8} : LayerBits{pick(2, 4), pick(2, 8)};
    const auto scan = ratio_scan(l, cfg, bits);
    for (int k = 1; k <= l.c_out; ++k) {
      ASSERT_LE(scan.lut[static_cast<std::size_t>(k - 1)], scan.lut[static_cast<std::size_t>(k)]);
      ASSERT_LE(scan.dsp[static_cast<std::size_t>(k - 1)], scan.dsp[static_cast<std::size_t>(k)]);
    }
    int exhaustive = -1;
    try {
      exhaustive = best_lut_cols(scan);
    } catch (const Error&) {
      EXPECT_THROW(optimal_ratio(l, cfg, bits), Error);
      continue;
    }
    EXPECT_EQ(optimal_ratio(l, cfg, bits).lut_cols, exhaustive) << "layer " << l.index;
  }
}

TEST(OptimalRatio, SlowLutCoreGetsMinorShare) {
  const auto l = builtin_network("resnet18").layers[10];
  ArchConfig cfg;
  cfg.lut = {.M = 1, .N = 1, .K = 64};
  const auto s = optimal_ratio(l, cfg, LayerBits{4, 8});
  EXPECT_LT(s.ratio(), 0.5);
}

TEST(OptimalRatio, WideActivationsGoToLutCore) {
  const auto l = builtin_network("resnet18").layers.front();
  const auto s = optimal_ratio(l, ArchConfig{}, LayerBits{8, 8});
  EXPECT_EQ(s.lut_cols, l.c_out);
  EXPECT_EQ(s.latency.dsp.total, 0u);
}

TEST(OptimalRatio, LatencyCurveIsUnimodal) {
  const auto net = builtin_network("resnet18");
  ArchConfig cfg;
  cfg.lut = {.M = 8, .N = 16, .K = 128};
  for (int idx : {6, 10, 15}) {
    const auto& l = net.layers[static_cast<std::size_t>(idx)];
    const auto scan = ratio_scan(l, cfg, LayerBits{4, 4});
    for (int k = 1; k <= l.c_out; ++k) {
      EXPECT_LE(scan.lut[static_cast<std::size_t>(k - 1)], scan.lut[static_cast<std::size_t>(k)]);
      EXPECT_LE(scan.dsp[static_cast<std::size_t>(k - 1)], scan.dsp[static_cast<std::size_t>(k)]);
    }
    const int best = best_lut_cols(scan);
    for (int k = 1; k <= best; ++k) EXPECT_GE(scan.cycles(k - 1), scan.cycles(k));
    for (int k = best + 1; k <= l.c_out; ++k) EXPECT_LE(scan.cycles(k - 1), scan.cycles(k));
    EXPECT_GT(best, 0);
    EXPECT_LT(best, l.c_out);
  }
}

TEST(PlanNetwork, DepthwiseLayersStayOnDspUnderSlowLutCore) {
  const auto net = builtin_network("mobilenetv2");
  ArchConfig cfg;
  cfg.lut = {.M = 1, .N = 1, .K = 64};
  cfg.default_bits = {4, 8};
  const auto plan = plan_network(net, cfg, cfg.scheme_for(net));
  int depthwise = 0;
  for (std::size_t i = 0; i < net.layers.size(); ++i)
    if (net.layers[i].is_depthwise) {
      ++depthwise;
      EXPECT_EQ(plan.layers[i].lut_cols, 0) << "layer " << net.layers[i].index;
      EXPECT_TRUE(plan.layers[i].forced_zero);
    }
  EXPECT_EQ(depthwise, 17);
}

TEST(PlanNetwork, DepthwiseTieGoesToDsp) {
  LayerSpec dw{.index = 1, .c_in = 16, .c_out = 16, .kernel = 3, .stride = 1, .padding = 1, .fmap = 8,
               .is_sc_or_dw = true, .is_depthwise = true};
  dw.n_params = dw.expected_params();
  ArchConfig cfg;
  const auto best = optimal_ratio(dw, cfg, LayerBits{4, 4});
  const auto planned = plan_layer(dw, cfg, LayerBits{4, 4});
  EXPECT_LE(planned.cycles(), best.cycles());
  if (planned.lut_cols == 0) {
    EXPECT_TRUE(planned.forced_zero);
  }
  const auto zero = layer_latency_cols(dw, cfg, LayerBits{4, 4}, 0).cycles();
  EXPECT_EQ(planned.lut_cols == 0, zero <= best.cycles());
}

TEST(PlanNetwork, AgreesWithNetworkLatency) {
  for (const auto& name : {"synthetic-small", "resnet18"}) {
    const auto net = builtin_network(name);
    ArchConfig cfg;
    cfg.lut = {.M = 8, .N = 16, .K = 128};
    cfg.default_bits = {3, 5};
    const auto scheme = cfg.scheme_for(net);
    const auto plan = plan_network(net, cfg, scheme);
    const auto applied = apply_plan(cfg, scheme, plan);
    EXPECT_EQ(network_latency(net, applied).cycles, plan.cycles) << name;
    EXPECT_EQ(network_latency(net, parse_arch_config(to_config_text(applied))).cycles, plan.cycles) << name;
    EXPECT_EQ(network_latency(net, complete_ratios(net, cfg)).cycles, plan.cycles) << name;
  }
}

TEST(PlanNetwork, ConcurrentEqualsSerial) {
  const auto net = builtin_network("resnet18");
  ArchConfig cfg;
  const auto scheme = cfg.scheme_for(net);
  const auto a = plan_network(net, cfg, scheme);
  const auto b = plan_network(net, cfg, scheme, {}, true);
  EXPECT_EQ(a.cycles, b.cycles);
  EXPECT_EQ(a.ratios(), b.ratios());
}

TEST(PlanNetwork, SingleLayer) {
  auto net = builtin_network("synthetic-small");
  net.layers.resize(1);
  ArchConfig cfg;
  const auto plan = plan_network(net, cfg, cfg.scheme_for(net));
  const auto one = optimal_ratio(net.layers[0], cfg, cfg.bits_for(net.layers[0]));
  ASSERT_EQ(plan.layers.size(), 1u);
  EXPECT_EQ(plan.layers[0].lut_cols, one.lut_cols);
  EXPECT_EQ(plan.cycles, one.cycles());
}

TEST(CompleteRatios, KeepsExplicitRatios) {
  const auto net = builtin_network("synthetic-small");
  ArchConfig cfg;
  cfg.layers[2] = LayerOverride{LayerBits{4, 4}, 0.25};
  const auto done = complete_ratios(net, cfg);
  EXPECT_EQ(done.ratio_for(net.layers[1]), 0.25);
  for (const auto& l : net.layers) EXPECT_TRUE(done.ratio_for(l).has_value());
}

TEST(PlanNetwork, SchemeMismatch) {
  const auto net = builtin_network("synthetic-small");
  ArchConfig cfg;
  QuantScheme s;
  EXPECT_THROW(plan_network(net, cfg, s), Error);
}

}  // namespace
}  // namespace n3h
