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

#include <algorithm>
#include <cmath>
#include <random>

#include "n3h/dse.hpp"

namespace n3h {
namespace {

ExploreEnv small_env(const AccuracyOracle& oracle, double target_ms = 1.0, std::string device = "XC7Z020") {
  ExploreEnv env;
  env.net = builtin_network("synthetic-small");
  env.device = device == "roomy"        ? DeviceProfile{"roomy", 220, 40'000'000, 1'000'000}
                 : device == "roomy-half" ? DeviceProfile{"roomy-half", 220, 5'000'000, 1'000'000}
                                           : builtin_device_db().find(device);
  env.target_ms = target_ms;
  env.oracle = &oracle;
  return env;
}

// ---------------------------------------------------------------------------
// Decoders and reward

TEST(DecodeHwAction, Fixtures) {
  const auto r = action_ranges("XC7Z020");
  EXPECT_EQ(decode_hw_action(0.5, r[HwKnob::M]), 26);  // 25.5 rounds up
  EXPECT_EQ(decode_hw_action(0.6, r[HwKnob::K]), 192);
  EXPECT_EQ(decode_hw_action(0.0, r[HwKnob::D_Lbuf_a]), 1024);
  EXPECT_EQ(decode_hw_action(1.0, r[HwKnob::D_Lbuf_a]), 50 * 1024);
  EXPECT_EQ(decode_hw_action(1.0, action_ranges("XC7Z045")[HwKnob::N]), 252);
}

TEST(DecodeHwAction, StaysInRangeAndMonotone) {
  for (const char* dev : {"XC7Z020", "XC7Z045"}) {
    const auto t = action_ranges(dev);
    for (const auto& r : t.hw) {
      int prev = 0;
      for (int i = -10; i <= 1010; ++i) {
        const int v = decode_hw_action(i / 1000.0, r);
        EXPECT_TRUE(r.contains(v)) << v;
        EXPECT_GE(v, prev);
        prev = v;
      }
      EXPECT_EQ(decode_hw_action(0, r), r.lo());
      EXPECT_EQ(decode_hw_action(1, r), r.hi());
    }
  }
}

TEST(DecodeBitAction, Fixtures) {
  EXPECT_EQ(decode_bit_action(0.5, kMinLutWeightBits, kMaxLutWeightBits), 5);
  EXPECT_EQ(decode_bit_action(0.0, kMinActBits, kMaxActBits), 2);
  EXPECT_EQ(decode_bit_action(1.0, kMinLutWeightBits, kMaxLutWeightBits), 8);  // 8.5 -> 9, clamped
}

TEST(DecodeBitAction, EqualShareOfTheInterval) {
  // Each of the 8 widths gets an interval of length 1/8 (ends aside).
  std::array<int, 9> hits{};
  const int n = 80000;
  for (int i = 0; i < n; ++i) ++hits[static_cast<std::size_t>(decode_bit_action((i + 0.5) / n, 1, 8))];
  for (int b = 1; b <= 8; ++b) EXPECT_NEAR(hits[static_cast<std::size_t>(b)], n / 8, 2) << b;
}

TEST(Reward, Fixtures) {
  EXPECT_DOUBLE_EQ(reward(45, 30, 70, 70), -1.5);
  EXPECT_DOUBLE_EQ(reward(30, 30, 70, 70), 0.0);
  EXPECT_NEAR(reward(20, 30, 70.45, 69.65), 0.008, 1e-12);
  EXPECT_THROW(reward(1, 0, 1, 1), Error);
}

TEST(Reward, PenaltyBelowMinusOneAndQualityWithinOne) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(0.01, 100), acc(0, 100);
  for (int i = 0; i < 10000; ++i) {
    const double lm = lat(rng), lt = lat(rng), aq = acc(rng), ab = acc(rng);
    const double r = reward(lm, lt, aq, ab);
    if (lm > lt) {
      EXPECT_LT(r, -1.0);
    } else {
      EXPECT_GE(r, -1.0);
      EXPECT_LE(r, 1.0);
      EXPECT_EQ(r > 0, aq > ab);
    }
  }
}

// ---------------------------------------------------------------------------
// State

TEST(StateEncoder, HardwareStateOnlyCarriesLastAction) {
  const StateEncoder enc(builtin_network("resnet18"));
  const auto s = enc.hardware(0.3);
  for (int d = 0; d < kStateDim; ++d) EXPECT_EQ(s[static_cast<std::size_t>(d)], d == kLastAction ? 0.3 : 0.0);
}

TEST(StateEncoder, LayerFieldsNormalizedOverNetwork) {
  const auto net = builtin_network("resnet18");
  const StateEncoder enc(net);
  const auto first = enc.quantization(net.layers.front(), BitTarget::LutWeights, 0, 0);
  const auto last = enc.quantization(net.layers.back(), BitTarget::Activations, 0.25, 0.9);
  EXPECT_EQ(first[kIdFunc], 1);
  EXPECT_EQ(first[kLayerIndex], 0);
  EXPECT_EQ(last[kLayerIndex], 1);
  EXPECT_EQ(first[kCin], 0);     // 3 is the smallest c_in
  EXPECT_EQ(first[kFmap], 1);    // 224 is the largest map
  EXPECT_EQ(last[kFmap], 0);
  EXPECT_EQ(first[kBitTarget], 0);
  EXPECT_EQ(last[kBitTarget], 1);
  EXPECT_EQ(last[kRatio], 0.25);
  EXPECT_EQ(last[kLastAction], 0.9);
  // layer 8 is a 1x1 shortcut
  EXPECT_EQ(enc.quantization(net.layers[7], BitTarget::LutWeights, 0, 0)[kShortcutOrDw], 1);
  for (const auto& l : net.layers)
    for (double v : enc.quantization(l, BitTarget::Activations, 0.5, 0.5)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
}

// ---------------------------------------------------------------------------
// Episodes

TEST(Episode, LengthIsSixPlusTwoPerLayer) {
  const auto small = builtin_network("synthetic-small");
  const auto resnet = builtin_network("resnet18");
  EXPECT_EQ(episode_length(small), 14);
  EXPECT_EQ(episode_length(resnet), 48);

  const ProxyOracle so(small), ro(resnet);
  auto env = small_env(so);
  EXPECT_EQ(run_episode([](const StateVec&) { return 0.5; }, env).steps.size(), 14u);
  env.net = resnet;
  env.oracle = &ro;
  EXPECT_EQ(run_episode([](const StateVec&) { return 0.5; }, env).steps.size(), 48u);
}

TEST(Episode, StateSequence) {
  const ProxyOracle o(builtin_network("synthetic-small"));
  const auto env = small_env(o);
  std::vector<double> actions{0.1, 0.0, 0.0, 0.1, 0.1, 0.1};
  for (int i = 0; i < 8; ++i) actions.push_back(0.05 * (i + 1));
  std::size_t next = 0;
  const auto tr = run_episode([&](const StateVec&) { return actions[next++]; }, env);
  ASSERT_EQ(tr.steps.size(), 14u);
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const auto& s = tr.steps[i].state;
    EXPECT_EQ(s[kIdFunc], i < 6 ? 0 : 1) << i;
    EXPECT_DOUBLE_EQ(s[kLastAction], i == 0 ? 0.0 : actions[i - 1]) << i;
    EXPECT_DOUBLE_EQ(tr.steps[i].action, actions[i]);
    for (double v : s) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    if (i >= 6) {
      EXPECT_EQ(s[kBitTarget], (i - 6) % 2) << i;
      const std::size_t layer = (i - 6) / 2;
      EXPECT_DOUBLE_EQ(s[kRatio], layer == 0 ? 0.0 : tr.point.ratios[layer - 1]) << i;
    }
  }
}

TEST(Episode, DecodesConfigAndPinsEdgeLayers) {
  const auto net = builtin_network("synthetic-small");
  const ProxyOracle o(net);
  const auto env = small_env(o, 100.0);
  // K=64, M=1, N=1, D_Lbuf_a=1024*6, D_Dbuf_a=1024*3, D_Dbuf_w=1024*1, then
  // B_wL = 2 and B_a = 2 for every layer.
  const std::vector<double> hw{0.0, 0.0, 0.0, 0.1, 0.1, 0.0};
  std::size_t step = 0;
  const auto tr = run_episode([&](const StateVec&) { return step < 6 ? hw[step++] : (++step, 0.0); }, env);
  const auto& p = tr.point;
  EXPECT_EQ(p.config.lut.K, 64);
  EXPECT_EQ(p.config.lut.M, 1);
  EXPECT_EQ(p.config.lut.N, 1);
  EXPECT_EQ(p.config.lut.D_Lbuf_a, 6 * 1024);
  EXPECT_EQ(p.config.dsp.D_Dbuf_a, 3 * 1024);
  EXPECT_EQ(p.config.dsp.D_Dbuf_w, 1024);
  ASSERT_TRUE(p.feasible) << p.violations;
  EXPECT_EQ(p.scheme.layers.front(), (LayerBits{8, 8}));
  EXPECT_EQ(p.scheme.layers.back(), (LayerBits{8, 8}));
  EXPECT_EQ(p.scheme.layers[1], (LayerBits{2, 2}));
  EXPECT_EQ(p.ratios.front(), 1.0);  // 8-bit activations stay on the LUT-core

  // The reported point agrees with the standalone planner and oracle.
  const auto plan = plan_network(net, p.config, p.scheme);
  EXPECT_EQ(plan.cycles, p.cycles);
  EXPECT_EQ(plan.ratios(), p.ratios);
  EXPECT_DOUBLE_EQ(p.latency_ms, cycles_to_ms(plan.cycles));
  EXPECT_DOUBLE_EQ(p.accuracy, o.estimate(p.scheme, p.ratios));
  EXPECT_DOUBLE_EQ(p.reward, reward(p.latency_ms, 100.0, p.accuracy, o.baseline()));
  for (const auto& s : tr.steps) EXPECT_EQ(s.reward, p.reward);
}

TEST(Episode, OversizedHardwareIsInfeasibleButRunsEveryStep) {
  const ProxyOracle o(builtin_network("synthetic-small"));
  const auto tr = run_episode([](const StateVec&) { return 1.0; }, small_env(o));
  EXPECT_EQ(tr.steps.size(), 14u);
  EXPECT_FALSE(tr.point.feasible);
  EXPECT_FALSE(tr.point.violations.empty());
  const auto fit = check_fit(tr.point.config, builtin_device_db().find("XC7Z020"));
  EXPECT_DOUBLE_EQ(tr.point.reward, infeasible_reward(fit, builtin_device_db().find("XC7Z020")));
  EXPECT_LT(tr.point.reward, kInfeasibleReward);
  for (const auto& s : tr.steps) EXPECT_EQ(s.reward, tr.point.reward);
}

TEST(Reward, InfeasibleFallsWithWorstOveruse) {
  const DeviceProfile dev{"d", 100, 1000, 10};
  ResourceReport r;
  r.lut_used = 1000;
  r.bram_used = 10;
  r.dsp_used = 100;
  EXPECT_DOUBLE_EQ(infeasible_reward(r, dev), -2.0);
  r.bram_used = 20;
  EXPECT_DOUBLE_EQ(infeasible_reward(r, dev), -2.0 - std::log(2.0));
  r.lut_used = 4000;
  EXPECT_DOUBLE_EQ(infeasible_reward(r, dev), -2.0 - std::log(4.0));
}

TEST(Episode, NeedsOracle) {
  ExploreEnv env;
  env.net = builtin_network("synthetic-small");
  env.device = builtin_device_db().find("XC7Z020");
  EXPECT_THROW(run_episode([](const StateVec&) { return 0.5; }, env), Error);
}

// ---------------------------------------------------------------------------
// DDPG

std::vector<Transition> random_batch(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Transition> b(static_cast<std::size_t>(n));
  for (auto& t : b) {
    for (auto& v : t.state) v = u(rng);
    for (auto& v : t.next) v = u(rng);
    t.action = u(rng);
    t.reward = 2 * u(rng) - 1;
    t.done = u(rng) < 0.2;
  }
  return b;
}

TEST(Ddpg, NetworkShapes) {
  DdpgAgent a(1);
  EXPECT_EQ(a.actor().input_size(), kStateDim);
  EXPECT_EQ(a.critic().input_size(), kStateDim + 1);
  EXPECT_EQ(a.actor().output_size(), 1);
  EXPECT_EQ(a.actor_target().params(), a.actor().params());
  EXPECT_EQ(a.critic_target().params(), a.critic().params());
  const double p = a.policy(StateVec{});
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
}

TEST(Ddpg, CriticGradientMatchesFiniteDifferences) {
  DdpgAgent a(2);
  const auto batch = random_batch(3, 16);
  const auto y = a.targets(batch);
  std::vector<double> g;
  a.critic_loss(batch, y, &g);
  std::vector<double> fd(g.size());
  const double h = 1e-5;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double keep = a.critic().params()[i];
    a.critic().params()[i] = keep + h;
    const double up = a.critic_loss(batch, y, nullptr);
    a.critic().params()[i] = keep - h;
    const double down = a.critic_loss(batch, y, nullptr);
    a.critic().params()[i] = keep;
    fd[i] = (up - down) / (2 * h);
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    num += (g[i] - fd[i]) * (g[i] - fd[i]);
    den += fd[i] * fd[i];
  }
  EXPECT_LT(std::sqrt(num / den), 1e-6);
}

TEST(Ddpg, CriticLossFallsOnFixedBatch) {
  DdpgAgent a(4);
  const auto batch = random_batch(5, 64);
  const double first = a.ddpg_step(batch);
  double last = first;
  for (int i = 0; i < 300; ++i) last = a.ddpg_step(batch);
  EXPECT_LT(last, 0.5 * first);
}

TEST(Ddpg, TargetsTrackOnlineNetworksSlowly) {
  DdpgOptions opt;
  opt.tau = 0.01;
  DdpgAgent a(6, opt);
  const auto before = a.critic_target().params();
  a.ddpg_step(random_batch(7, 8));
  for (std::size_t i = 0; i < before.size(); ++i)
    EXPECT_NEAR(a.critic_target().params()[i], 0.99 * before[i] + 0.01 * a.critic().params()[i], 1e-12);
}

TEST(Ddpg, ActorStepRaisesCriticValue) {
  DdpgOptions opt;
  opt.actor_lr = 1e-2;
  opt.critic_lr = 1e-12;  // critic effectively frozen
  DdpgAgent a(8, opt);
  const auto batch = random_batch(9, 64);
  auto mean_q = [&] {
    double q = 0;
    for (const auto& t : batch) q += DdpgAgent::q_value(a.critic(), t.state, a.policy(t.state));
    return q / static_cast<double>(batch.size());
  };
  const double before = mean_q();
  for (int i = 0; i < 20; ++i) a.ddpg_step(batch);
  EXPECT_GT(mean_q(), before);
}

TEST(Ddpg, ActionsStayInUnitInterval) {
  DdpgOptions opt;
  opt.warmup_episodes = 0;
  opt.noise_init = 3.0;
  DdpgAgent a(10, opt);
  StateVec s{};
  for (int i = 0; i < 1000; ++i) {
    s[kLastAction] = (i % 10) / 10.0;
    const double v = a.act(s);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Ddpg, ReplayIsBounded) {
  DdpgOptions opt;
  opt.replay_capacity = 30;
  opt.batch = 8;
  DdpgAgent a(11, opt);
  const ProxyOracle o(builtin_network("synthetic-small"));
  const auto env = small_env(o);
  for (int e = 0; e < 5; ++e) a.observe(run_episode([&](const StateVec& s) { return a.act(s); }, env));
  EXPECT_EQ(a.replay().size(), 30u);
  EXPECT_TRUE(a.replay().back().done);
  EXPECT_EQ(a.episodes_seen(), 5);
}

TEST(Ddpg, NoiseDecaysLinearlyToFloor) {
  DdpgOptions opt;
  opt.warmup_episodes = 2;
  opt.batch = 4;
  opt.noise_init = 0.5;
  opt.noise_final = 0.1;
  opt.noise_decay_episodes = 4;
  DdpgAgent a(12, opt);
  EpisodeTrace tr;
  tr.steps.resize(3);
  tr.point.reward = -0.5;
  const double expect[] = {0.5, 0.5, 0.4, 0.3, 0.2, 0.1, 0.1, 0.1};
  for (double n : expect) {
    a.observe(tr);
    EXPECT_NEAR(a.noise(), n, 1e-12) << a.episodes_seen();
  }
}

TEST(Ddpg, CriticLossFallsUnderConstantZeroReward) {
  DdpgAgent a(13);
  auto batch = random_batch(14, 64);
  for (auto& t : batch) t.reward = 0;
  const double first = a.ddpg_step(batch);
  double last = first;
  for (int i = 0; i < 100; ++i) last = a.ddpg_step(batch);
  EXPECT_LT(last, first);
}

// ---------------------------------------------------------------------------
// Exploration

TEST(Explore, DeterministicPerSeed) {
  const ProxyOracle o(builtin_network("synthetic-small"));
  const auto env = small_env(o);
  for (auto strategy : {Strategy::Random, Strategy::Ddpg}) {
    const auto a = explore(env, 25, strategy, 3);
    const auto b = explore(env, 25, strategy, 3);
    ASSERT_EQ(a.history.size(), 25u);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      EXPECT_EQ(a.history[i].point.reward, b.history[i].point.reward);
      EXPECT_EQ(a.history[i].point.scheme, b.history[i].point.scheme);
    }
  }
}

TEST(Explore, BestIsHighestFeasibleReward) {
  const ProxyOracle o(builtin_network("synthetic-small"));
  // Random hardware rarely fits the real parts; this device fits about half.
  const auto r = explore(small_env(o, 1.0, "roomy-half"), 40, Strategy::Random, 5);
  double best = -1e9;
  for (const auto& h : r.history)
    if (h.point.feasible) best = std::max(best, h.point.reward);
  ASSERT_TRUE(r.best.has_value());
  EXPECT_EQ(r.best->reward, best);
  EXPECT_TRUE(r.best->feasible);
  const auto infeasible = std::count_if(r.history.begin(), r.history.end(), [](const EpisodeRecord& h) { return !h.point.feasible; });
  EXPECT_GT(infeasible, 0);
  EXPECT_LT(infeasible, 40);
}

TEST(Explore, RewardsWithinTargetLieInUnitBand) {
  const ProxyOracle o(builtin_network("synthetic-small"));
  const auto r = explore(small_env(o, 1000.0, "roomy"), 30, Strategy::Random, 6);
  int within = 0;
  for (const auto& h : r.history) {
    ASSERT_TRUE(h.point.feasible) << h.point.violations;
    ASSERT_LE(h.point.latency_ms, 1000.0);
    EXPECT_GT(h.point.reward, -1.0);
    EXPECT_LT(h.point.reward, 1.0);
    ++within;
  }
  EXPECT_GT(within, 0);
}

TEST(Explore, ZeroEpisodes) {
  const ProxyOracle o(builtin_network("synthetic-small"));
  const auto r = explore(small_env(o), 0, Strategy::Ddpg, 1);
  EXPECT_TRUE(r.history.empty());
  EXPECT_FALSE(r.best.has_value());
}

TEST(Explore, AccuracyBaselineOverride) {
  const ProxyOracle o(builtin_network("synthetic-small"));
  auto env = small_env(o, 1000.0, "roomy");
  env.acc_baseline = 50.0;
  const auto tr = run_episode([](const StateVec&) { return 0.3; }, env);
  ASSERT_TRUE(tr.point.feasible);
  EXPECT_DOUBLE_EQ(tr.point.reward, (tr.point.accuracy - 50.0) * kRewardLambda);
}

TEST(Explore, ParsesStrategy) {
  EXPECT_EQ(parse_strategy("ddpg"), Strategy::Ddpg);
  EXPECT_EQ(parse_strategy("random"), Strategy::Random);
  EXPECT_THROW(parse_strategy("grid"), Error);
  EXPECT_THROW(explore(ExploreEnv{}, -1, Strategy::Random, 0), Error);
}

}  // namespace
}  // namespace n3h
