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

// Design-space exploration with a DDPG agent or random search.
//
// One episode takes 6 + 2N actions in [0, 1]: the six hardware knobs
// (K, M, N, D_Lbuf_a, D_Dbuf_a, D_Dbuf_w), then B_wL and B_a for each of the
// N layers. After both bit-widths of a layer are known its split ratio is
// set to the latency-optimal one. The episode reward is
//
//   (L_t - L_m) / L_t - 1          if L_m > L_t
//   (acc_q - acc_b) * lambda       otherwise
//
// and at most -2 when the hardware does not fit the device, falling with the
// log of the worst resource over-use. First and last layers stay at 8/8
// whatever the agent picks for them.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "n3h/arch.hpp"
#include "n3h/cost.hpp"
#include "n3h/nn.hpp"
#include "n3h/oracle.hpp"
#include "n3h/sched.hpp"
#include "n3h/split.hpp"
#include "n3h/text_format.hpp"
#include "n3h/workload.hpp"

namespace n3h {

// ---------------------------------------------------------------------------
// Actions and reward

inline int decode_hw_action(double a, const KnobRange& r) {
  a = std::clamp(a, 0.0, 1.0);
  const auto v = round_half_away(a * (r.v_max - r.v_min) + r.v_min);
  return static_cast<int>(std::clamp<std::int64_t>(v, r.v_min, r.v_max)) * r.multiplier;
}

/// a = 1 lands on b_max + 1 before clamping.
inline int decode_bit_action(double a, int b_min, int b_max) {
  a = std::clamp(a, 0.0, 1.0);
  const auto v = round_half_away(a * (b_max - b_min + 1) + b_min - 0.5);
  return static_cast<int>(std::clamp<std::int64_t>(v, b_min, b_max));
}

inline constexpr double kRewardLambda = 0.01;
inline constexpr double kInfeasibleReward = -2.0;

/// -2 - ln(max used/available) over LUT, BRAM and DSP.
inline double infeasible_reward(const ResourceReport& r, const DeviceProfile& dev) {
  const double worst = std::max({1.0, static_cast<double>(r.lut_used) / static_cast<double>(dev.lut_total),
                                 static_cast<double>(r.bram_used) / static_cast<double>(dev.bram36_total),
                                 static_cast<double>(r.dsp_used) / static_cast<double>(dev.dsp_total)});
  return kInfeasibleReward - std::log(worst);
}

inline double reward(double latency_ms, double target_ms, double acc_q, double acc_b, double lambda = kRewardLambda) {
  if (!(target_ms > 0)) throw input_error("latency target must be positive");
  if (latency_ms > target_ms) return (target_ms - latency_ms) / target_ms - 1.0;
  return (acc_q - acc_b) * lambda;
}

// ---------------------------------------------------------------------------
// State

inline constexpr int kStateDim = 12;
using StateVec = std::array<double, kStateDim>;

/// Index of each state dimension.
enum StateField : int {
  kIdFunc = 0,     // 0 hardware knob, 1 quantization
  kLayerIndex,
  kCin,
  kCout,
  kKernel,
  kStride,
  kFmap,
  kParams,
  kShortcutOrDw,
  kBitTarget,      // 0 LUT weights, 1 activations
  kRatio,
  kLastAction,
};

enum class BitTarget { LutWeights = 0, Activations = 1 };

/// Min-max normalization of the per-layer state fields over one network.
class StateEncoder {
 public:
  explicit StateEncoder(const NetworkSpec& net) {
    lo_.fill(0);
    hi_.fill(0);
    bool first = true;
    for (const auto& l : net.layers) {
      const auto f = raw(l);
      for (std::size_t d = 0; d < f.size(); ++d) {
        lo_[d] = first ? f[d] : std::min(lo_[d], f[d]);
        hi_[d] = first ? f[d] : std::max(hi_[d], f[d]);
      }
      first = false;
    }
  }

  StateVec hardware(double last_action) const {
    StateVec s{};
    s[kLastAction] = std::clamp(last_action, 0.0, 1.0);
    return s;
  }

  StateVec quantization(const LayerSpec& l, BitTarget target, double ratio, double last_action) const {
    StateVec s{};
    s[kIdFunc] = 1;
    const auto f = raw(l);
    for (std::size_t d = 0; d < f.size(); ++d) {
      const double span = hi_[d] - lo_[d];
      s[kLayerIndex + d] = span > 0 ? (f[d] - lo_[d]) / span : 0.0;
    }
    s[kShortcutOrDw] = l.is_sc_or_dw ? 1 : 0;
    s[kBitTarget] = target == BitTarget::Activations ? 1 : 0;
    s[kRatio] = std::clamp(ratio, 0.0, 1.0);
    s[kLastAction] = std::clamp(last_action, 0.0, 1.0);
    return s;
  }

 private:
  // i, c_in, c_out, kernel, stride, fmap, n_params
  static std::array<double, 7> raw(const LayerSpec& l) {
    return {double(l.index), double(l.c_in), double(l.c_out), double(l.kernel), double(l.stride), double(l.fmap), double(l.n_params)};
  }

  std::array<double, 7> lo_, hi_;
};

// ---------------------------------------------------------------------------
// Episodes

struct DesignPoint {
  ArchConfig config;  // per-layer bits and ratios written out
  QuantScheme scheme;
  std::vector<double> ratios;
  std::uint64_t cycles = 0;
  double latency_ms = 0;
  double accuracy = 0;
  double reward = kInfeasibleReward;
  bool feasible = false;
  std::string violations;
};

struct EpisodeStep {
  StateVec state{};
  double action = 0;
  double reward = 0;
};

struct EpisodeTrace {
  std::vector<EpisodeStep> steps;
  DesignPoint point;
};

struct ExploreEnv {
  NetworkSpec net;
  DeviceProfile device;
  double target_ms = 1.0;
  const AccuracyOracle* oracle = nullptr;
  Tunables tunables;
  ArchConfig base;                    // knobs the agent does not pick (N_reg_row_a, D_Lbuf_w)
  std::optional<double> acc_baseline;  // acc_b; the oracle's full-precision figure when unset

  double acc_b() const { return acc_baseline ? *acc_baseline : oracle->baseline(); }
};

inline int episode_length(const NetworkSpec& net) { return kHwKnobCount + 2 * static_cast<int>(net.layers.size()); }

using Policy = std::function<double(const StateVec&)>;

inline EpisodeTrace run_episode(const Policy& policy, const ExploreEnv& env) {
  if (!env.oracle) throw input_error("exploration needs an accuracy oracle");
  const auto ranges = action_ranges(env.device.name);
  const StateEncoder enc(env.net);
  EpisodeTrace tr;
  auto& pt = tr.point;
  double last = 0;
  auto step = [&](const StateVec& s) {
    const double a = std::clamp(policy(s), 0.0, 1.0);
    tr.steps.push_back({s, a, 0});
    last = a;
    return a;
  };

  ArchConfig cfg = env.base;
  cfg.device = env.device.name;
  cfg.layers.clear();
  cfg.default_ratio.reset();
  for (int k = 0; k < kHwKnobCount; ++k) {
    const auto knob = static_cast<HwKnob>(k);
    set_knob(cfg, knob, decode_hw_action(step(enc.hardware(last)), ranges[knob]));
  }
  const auto fit = check_fit(cfg, env.device);
  pt.feasible = fit.feasible;
  pt.violations = fit.violations();

  double prev_ratio = 0;
  for (const auto& l : env.net.layers) {
    LayerBits bits;
    bits.b_wl = decode_bit_action(step(enc.quantization(l, BitTarget::LutWeights, prev_ratio, last)), ranges.b_wl_min, ranges.b_wl_max);
    bits.b_a = decode_bit_action(step(enc.quantization(l, BitTarget::Activations, prev_ratio, last)), ranges.b_a_min, ranges.b_a_max);
    if (l.is_first_or_last) bits = LayerBits{kEdgeLayerBits, kEdgeLayerBits};
    pt.scheme.layers.push_back(bits);
    double ratio = 0;
    if (pt.feasible) {
      try {
        const auto split = plan_layer(l, cfg, bits, env.tunables);
        ratio = split.ratio();
        pt.cycles += split.cycles();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Infeasible) throw;
        pt.feasible = false;
        pt.violations += (pt.violations.empty() ? "" : "; ") + std::string("layer ") + std::to_string(l.index) + ": " + e.what();
      }
    }
    pt.ratios.push_back(ratio);
    prev_ratio = ratio;
  }
  pt.config = cfg.with_layers(pt.scheme, pt.ratios);

  if (pt.feasible) {
    pt.latency_ms = cycles_to_ms(pt.cycles);
    pt.accuracy = env.oracle->estimate(pt.scheme, pt.ratios);
    pt.reward = reward(pt.latency_ms, env.target_ms, pt.accuracy, env.acc_b());
  } else {
    pt.reward = fit.feasible ? kInfeasibleReward : infeasible_reward(fit, env.device);
  }
  for (auto& s : tr.steps) s.reward = pt.reward;
  return tr;
}

// ---------------------------------------------------------------------------
// DDPG

struct DdpgOptions {
  int hidden = 64;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double tau = 0.01;
  double gamma = 0.0;  // every step carries the episode reward
  int batch = 64;
  std::size_t replay_capacity = 10000;
  int warmup_episodes = 20;
  double noise_init = 0.5;
  double noise_final = 0.05;
  int noise_decay_episodes = 150;  // linear decay after warm-up
  double baseline_decay = 0.95;
};

struct Transition {
  StateVec state{};
  double action = 0;
  double reward = 0;
  StateVec next{};
  bool done = false;
};

class DdpgAgent {
 public:
  explicit DdpgAgent(std::uint64_t seed, DdpgOptions opt = {})
      : opt_(opt),
        rng_(seed),
        actor_({{kStateDim, opt.hidden, nn::Activation::Tanh},
                {opt.hidden, opt.hidden, nn::Activation::Tanh},
                {opt.hidden, 1, nn::Activation::Sigmoid}},
               seed * 2 + 1),
        critic_({{kStateDim + 1, opt.hidden, nn::Activation::Tanh},
                 {opt.hidden, opt.hidden, nn::Activation::Tanh},
                 {opt.hidden, 1, nn::Activation::Linear}},
                seed * 2 + 2),
        actor_target_(actor_),
        critic_target_(critic_),
        actor_opt_(opt.actor_lr),
        critic_opt_(opt.critic_lr),
        noise_(opt.noise_init) {}

  const DdpgOptions& options() const { return opt_; }
  nn::Mlp& actor() { return actor_; }
  nn::Mlp& critic() { return critic_; }
  const nn::Mlp& actor_target() const { return actor_target_; }
  const nn::Mlp& critic_target() const { return critic_target_; }
  const std::deque<Transition>& replay() const { return replay_; }
  int episodes_seen() const { return episodes_; }
  double noise() const { return noise_; }

  double policy(const StateVec& s) const { return actor_.forward(s)[0]; }

  /// Uniform during warm-up, then the policy plus truncated Gaussian noise.
  double act(const StateVec& s) {
    if (episodes_ < opt_.warmup_episodes) return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    const double mu = policy(s);
    std::normal_distribution<double> n(0.0, noise_);
    for (int tries = 0; tries < 32; ++tries) {
      const double a = mu + n(rng_);
      if (a >= 0.0 && a <= 1.0) return a;
    }
    return std::clamp(mu, 0.0, 1.0);
  }

  /// Stores the episode with a moving-average reward baseline subtracted,
  /// then trains once per step.
  void observe(const EpisodeTrace& tr) {
    const double r = tr.point.reward;
    baseline_ = episodes_ == 0 ? r : opt_.baseline_decay * baseline_ + (1 - opt_.baseline_decay) * r;
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
      Transition t;
      t.state = tr.steps[i].state;
      t.action = tr.steps[i].action;
      t.reward = r - baseline_;
      t.done = i + 1 == tr.steps.size();
      if (!t.done) t.next = tr.steps[i + 1].state;
      replay_.push_back(t);
      if (replay_.size() > opt_.replay_capacity) replay_.pop_front();
    }
    ++episodes_;
    if (episodes_ > opt_.warmup_episodes) {
      const double f = std::min(1.0, static_cast<double>(episodes_ - opt_.warmup_episodes) / std::max(1, opt_.noise_decay_episodes));
      noise_ = opt_.noise_init + f * (opt_.noise_final - opt_.noise_init);
      if (replay_.size() >= static_cast<std::size_t>(opt_.batch))
        for (std::size_t i = 0; i < tr.steps.size(); ++i) ddpg_step(sample_batch());
    }
  }

  std::vector<Transition> sample_batch() {
    std::uniform_int_distribution<std::size_t> pick(0, replay_.size() - 1);
    std::vector<Transition> b;
    for (int i = 0; i < opt_.batch; ++i) b.push_back(replay_[pick(rng_)]);
    return b;
  }

  /// TD targets from the target networks.
  std::vector<double> targets(const std::vector<Transition>& batch) const {
    std::vector<double> y;
    for (const auto& t : batch) {
      double v = t.reward;
      if (!t.done && opt_.gamma != 0.0) v += opt_.gamma * q_value(critic_target_, t.next, actor_target_.forward(t.next)[0]);
      y.push_back(v);
    }
    return y;
  }

  /// Mean squared TD error and its gradient with respect to the critic
  /// parameters, for fixed targets.
  double critic_loss(const std::vector<Transition>& batch, const std::vector<double>& y, std::vector<double>* grad) const {
    if (grad) grad->assign(critic_.size(), 0.0);
    double loss = 0;
    nn::Tape tape;
    const double n = static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto in = critic_input(batch[i].state, batch[i].action);
      critic_.forward(in, tape);
      const double err = tape.output[0] - y[i];
      loss += err * err / n;
      if (grad) {
        const double d = 2 * err / n;
        critic_.backward(tape, std::span<const double>(&d, 1), *grad);
      }
    }
    return loss;
  }

  /// One critic and one actor update followed by soft target updates.
  /// Returns the critic loss before the update.
  double ddpg_step(const std::vector<Transition>& batch) {
    const auto y = targets(batch);
    std::vector<double> g;
    const double loss = critic_loss(batch, y, &g);
    critic_opt_.step(critic_.params(), g);

    // Actor: ascend Q(s, mu(s)).
    std::vector<double> ga(actor_.size(), 0.0), gc_unused;
    nn::Tape at, ct;
    const double n = static_cast<double>(batch.size());
    for (const auto& t : batch) {
      actor_.forward(t.state, at);
      critic_.forward(critic_input(t.state, at.output[0]), ct);
      const double dq = -1.0 / n;
      gc_unused.assign(critic_.size(), 0.0);
      const auto d_in = critic_.backward(ct, std::span<const double>(&dq, 1), gc_unused);
      const double da = d_in[kStateDim];
      actor_.backward(at, std::span<const double>(&da, 1), ga);
    }
    actor_opt_.step(actor_.params(), ga);

    nn::soft_update(actor_target_, actor_, opt_.tau);
    nn::soft_update(critic_target_, critic_, opt_.tau);
    return loss;
  }

  static std::vector<double> critic_input(const StateVec& s, double a) {
    std::vector<double> in(s.begin(), s.end());
    in.push_back(a);
    return in;
  }

  static double q_value(const nn::Mlp& critic, const StateVec& s, double a) { return critic.forward(critic_input(s, a))[0]; }

 private:
  DdpgOptions opt_;
  std::mt19937_64 rng_;
  nn::Mlp actor_, critic_, actor_target_, critic_target_;
  nn::Adam actor_opt_, critic_opt_;
  std::deque<Transition> replay_;
  double noise_;
  double baseline_ = 0;
  int episodes_ = 0;
};

// ---------------------------------------------------------------------------
// Exploration loop

enum class Strategy { Ddpg, Random };

inline Strategy parse_strategy(std::string_view s) {
  if (s == "ddpg") return Strategy::Ddpg;
  if (s == "random") return Strategy::Random;
  throw input_error("unknown strategy '" + std::string(s) + "' (known: ddpg, random)");
}

inline const char* to_string(Strategy s) { return s == Strategy::Ddpg ? "ddpg" : "random"; }

struct EpisodeRecord {
  int episode = 0;
  DesignPoint point;
};

struct ExploreResult {
  std::vector<EpisodeRecord> history;
  std::optional<DesignPoint> best;  // highest-reward feasible point
};

/// Exploration settings file, one record:
///   explore network=<name|path> device=<name> target_ms=<ms> [episodes=200]
///           [strategy=ddpg|random] [seed=0] [oracle=proxy|mlp] [acc_b=<percent>]
struct ExploreSettings {
  std::string network;
  std::string device;
  double target_ms = 0;
  int episodes = 200;
  Strategy strategy = Strategy::Ddpg;
  std::uint64_t seed = 0;
  std::string oracle = "proxy";
  std::optional<double> acc_b;
};

inline ExploreSettings parse_explore_settings(std::string_view text) {
  ExploreSettings s;
  bool seen = false;
  for (const auto& rec : text::parse(text)) {
    if (rec.tag != "explore") throw input_error(rec.where() + ": unknown record tag '" + rec.tag + "'");
    if (seen) throw input_error(rec.where() + ": duplicate explore record");
    seen = true;
    s.network = rec.get_string_or("network", "");
    s.device = rec.get_string_or("device", "");
    s.target_ms = rec.get_double_or("target_ms", 0);
    s.episodes = static_cast<int>(rec.get_int_or("episodes", s.episodes));
    s.strategy = parse_strategy(rec.get_string_or("strategy", "ddpg"));
    const auto seed = rec.get_int_or("seed", 0);
    if (seed < 0) throw input_error(rec.where() + ": seed must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
    s.oracle = rec.get_string_or("oracle", s.oracle);
    if (rec.has("acc_b")) s.acc_b = rec.get_double("acc_b");
  }
  if (!seen) throw input_error("settings have no 'explore' record");
  return s;
}

inline ExploreResult explore(const ExploreEnv& env, int episodes, Strategy strategy, std::uint64_t seed,
                             const DdpgOptions& opt = {}) {
  if (episodes < 0) throw input_error("episode count must be non-negative");
  ExploreResult out;
  DdpgAgent agent(seed, opt);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int e = 0; e < episodes; ++e) {
    EpisodeTrace tr;
    if (strategy == Strategy::Random) {
      tr = run_episode([&](const StateVec&) { return u(rng); }, env);
    } else {
      tr = run_episode([&](const StateVec& s) { return agent.act(s); }, env);
      agent.observe(tr);
    }
    if (tr.point.feasible && (!out.best || tr.point.reward > out.best->reward)) out.best = tr.point;
    out.history.push_back({e, std::move(tr.point)});
  }
  return out;
}

}  // namespace n3h
