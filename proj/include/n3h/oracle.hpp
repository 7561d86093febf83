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

// Accuracy oracles for exploration. Neither reproduces ImageNet accuracy;
// they rank quantization schemes consistently and deterministically.
//
//   ProxyOracle: acc_b - S * sum_i (p_i / P) * (relMSE_w,i + relMSE_a,i),
//     with seeded synthetic weights quantized through the hybrid KL
//     allocation and a synthetic ReLU activation sample.
//   MlpOracle: a small classifier trained on Gaussian blobs, one dense
//     layer per network layer, evaluated with fake-quantized weights and
//     activations.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "n3h/nn.hpp"
#include "n3h/quantize.hpp"
#include "n3h/workload.hpp"

namespace n3h {

class AccuracyOracle {
 public:
  virtual ~AccuracyOracle() = default;
  virtual std::string name() const = 0;
  /// acc_b, in percent.
  virtual double baseline() const = 0;
  /// acc_q in percent for per-layer bits and LUT split ratios of the bound
  /// network.
  virtual double estimate(const QuantScheme& scheme, const std::vector<double>& ratios) const = 0;
};

/// Full-precision top-1 accuracy used as acc_b for the bundled networks.
inline double baseline_accuracy(std::string_view network) {
  if (network == "resnet18") return 69.76;
  if (network == "mobilenetv2") return 71.88;
  return 70.0;
}

namespace detail {

inline void check_estimate_args(const NetworkSpec& net, const QuantScheme& scheme, const std::vector<double>& ratios) {
  validate(scheme, net);
  if (ratios.size() != net.layers.size()) throw input_error("one split ratio per layer required");
}

/// sum (x - q(x))^2 / sum x^2 for unsigned ReLU outputs at `bits`.
inline double activation_rel_mse(const std::vector<double>& sample, int bits) {
  double mx = 0, num = 0, den = 0;
  for (double v : sample) mx = std::max(mx, v);
  if (!(mx > 0)) return 0.0;
  const double step = mx / ((1 << bits) - 1);
  for (double v : sample) {
    const double q = std::clamp<double>(static_cast<double>(round_half_away(v / step)), 0, (1 << bits) - 1) * step;
    num += (v - q) * (v - q);
    den += v * v;
  }
  return num / den;
}

}  // namespace detail

class ProxyOracle final : public AccuracyOracle {
 public:
  static constexpr int kMaxSampledFanIn = 64;
  static constexpr int kActivationSamples = 4096;

  explicit ProxyOracle(NetworkSpec net, std::uint64_t seed = 0, double sensitivity = 20.0)
      : net_(std::move(net)), acc_b_(baseline_accuracy(net_.name)), sensitivity_(sensitivity) {
    std::mt19937_64 rng(seed);
    const double total = static_cast<double>(net_.total_params());
    for (const auto& l : net_.layers) {
      LayerData d;
      d.share = static_cast<double>(l.n_params) / total;
      const int fan = std::min(l.fan_in(), kMaxSampledFanIn);
      std::lognormal_distribution<double> scale(0.0, 0.5);
      std::exponential_distribution<double> mag(1.0);
      std::bernoulli_distribution sign(0.5);
      d.weights.assign(static_cast<std::size_t>(l.c_out), std::vector<double>(static_cast<std::size_t>(fan)));
      for (auto& f : d.weights) {
        const double s = scale(rng);
        for (auto& w : f) w = (sign(rng) ? 1 : -1) * mag(rng) * s;  // Laplace
      }
      for (int b = kMinLutWeightBits; b <= kDspWeightBits; ++b) {
        auto& div = d.divergence[static_cast<std::size_t>(b - kMinLutWeightBits)];
        for (const auto& f : d.weights) div.push_back(filter_divergence(f, b));
      }
      for (const auto& f : d.weights)
        for (double w : f) d.energy += w * w;
      layers_.push_back(std::move(d));
    }
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> act(kActivationSamples);
    for (auto& a : act) a = std::max(0.0, n01(rng));
    for (int b = 1; b <= 8; ++b) act_mse_[static_cast<std::size_t>(b)] = detail::activation_rel_mse(act, b);
  }

  std::string name() const override { return "proxy"; }
  double baseline() const override { return acc_b_; }
  const NetworkSpec& network() const { return net_; }

  double weight_rel_mse(std::size_t layer, const LayerBits& bits, double ratio) const {
    const auto& d = layers_.at(layer);
    const int low = std::min(bits.b_wl, bits.b_wd);
    const auto& div = d.divergence[static_cast<std::size_t>(std::clamp(low, kMinLutWeightBits, kDspWeightBits) - kMinLutWeightBits)];
    const int idx = net_.layers[layer].index;
    const auto assignment = allocate_by_divergence(div, ratio, bits.b_wl, bits.b_wd, idx);
    const auto q = hybrid_quantize_layer(d.weights, assignment, bits, idx).dequantized();
    double err = 0;
    for (std::size_t f = 0; f < d.weights.size(); ++f)
      for (std::size_t k = 0; k < d.weights[f].size(); ++k) {
        const double e = d.weights[f][k] - q(f, k);
        err += e * e;
      }
    return d.energy > 0 ? err / d.energy : 0.0;
  }

  double activation_rel_mse(int bits) const { return act_mse_.at(static_cast<std::size_t>(bits)); }

  double estimate(const QuantScheme& scheme, const std::vector<double>& ratios) const override {
    detail::check_estimate_args(net_, scheme, ratios);
    double loss = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& b = scheme.layers[i];
      loss += layers_[i].share * (weight_rel_mse(i, b, ratios[i]) + activation_rel_mse(b.b_a));
    }
    return acc_b_ - sensitivity_ * loss;
  }

 private:
  struct LayerData {
    double share = 0;
    double energy = 0;
    FilterWeights weights;
    std::array<std::vector<double>, kDspWeightBits - kMinLutWeightBits + 1> divergence;
  };

  NetworkSpec net_;
  double acc_b_;
  double sensitivity_;
  std::vector<LayerData> layers_;
  std::array<double, 9> act_mse_{};
};

class MlpOracle final : public AccuracyOracle {
 public:
  static constexpr int kFeatures = 16;
  static constexpr int kClasses = 8;
  static constexpr int kTrainSamples = 512;
  static constexpr int kTestSamples = 1024;
  static constexpr int kTrainSteps = 300;

  explicit MlpOracle(NetworkSpec net, std::uint64_t seed = 0) : net_(std::move(net)) {
    if (net_.layers.empty()) throw input_error("network has no layers");
    std::vector<nn::LayerShape> shapes;
    int in = kFeatures;
    for (std::size_t i = 0; i < net_.layers.size(); ++i) {
      const bool last = i + 1 == net_.layers.size();
      const int out = last ? kClasses : std::clamp(net_.layers[i].c_out, 8, 32);
      shapes.push_back({in, out, last ? nn::Activation::Linear : nn::Activation::Relu});
      in = out;
    }
    model_ = nn::Mlp(shapes, seed);

    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<std::vector<double>> centers(kClasses, std::vector<double>(kFeatures));
    for (auto& c : centers)
      for (auto& v : c) v = 0.8 * n01(rng);
    auto sample = [&](int count, std::vector<std::vector<double>>& xs, std::vector<int>& ys) {
      for (int s = 0; s < count; ++s) {
        const int y = s % kClasses;
        std::vector<double> x(kFeatures);
        for (int f = 0; f < kFeatures; ++f) x[static_cast<std::size_t>(f)] = centers[static_cast<std::size_t>(y)][static_cast<std::size_t>(f)] + n01(rng);
        xs.push_back(std::move(x));
        ys.push_back(y);
      }
    };
    std::vector<std::vector<double>> train_x;
    std::vector<int> train_y;
    sample(kTrainSamples, train_x, train_y);
    sample(kTestSamples, test_x_, test_y_);

    nn::Adam opt(1e-2);
    std::vector<double> grad;
    nn::Tape tape;
    for (int step = 0; step < kTrainSteps; ++step) {
      grad.assign(model_.size(), 0.0);
      for (std::size_t s = 0; s < train_x.size(); ++s) {
        model_.forward(train_x[s], tape);
        auto d = softmax(tape.output);
        d[static_cast<std::size_t>(train_y[s])] -= 1.0;
        for (auto& v : d) v /= static_cast<double>(train_x.size());
        model_.backward(tape, d, grad);
      }
      opt.step(model_.params(), grad);
    }

    // Calibration ranges of each layer input.
    input_max_.assign(shapes.size(), 0.0);
    for (const auto& x : test_x_) {
      model_.forward(x, tape);
      for (std::size_t l = 0; l < shapes.size(); ++l)
        for (double v : tape.inputs[l]) input_max_[l] = std::max(input_max_[l], std::abs(v));
    }
    acc_b_ = accuracy(model_, nullptr);
  }

  std::string name() const override { return "mlp"; }
  double baseline() const override { return acc_b_; }

  double estimate(const QuantScheme& scheme, const std::vector<double>& ratios) const override {
    detail::check_estimate_args(net_, scheme, ratios);
    nn::Mlp q = model_;
    for (std::size_t l = 0; l < q.layers().size(); ++l) {
      const auto& s = q.layers()[l];
      FilterWeights filters(static_cast<std::size_t>(s.out), std::vector<double>(static_cast<std::size_t>(s.in)));
      for (int o = 0; o < s.out; ++o)
        for (int i = 0; i < s.in; ++i) filters[static_cast<std::size_t>(o)][static_cast<std::size_t>(i)] = q.params()[q.weight_index(l, o, i)];
      const int idx = net_.layers[l].index;
      const auto& bits = scheme.layers[l];
      const auto assignment = kl_filter_alloc(filters, ratios[l], bits.b_wl, bits.b_wd, idx);
      const auto deq = hybrid_quantize_layer(filters, assignment, bits, idx).dequantized();
      for (int o = 0; o < s.out; ++o)
        for (int i = 0; i < s.in; ++i)
          q.params()[q.weight_index(l, o, i)] = deq(static_cast<std::size_t>(o), static_cast<std::size_t>(i));
    }
    return accuracy(q, &scheme);
  }

 private:
  static std::vector<double> softmax(const std::vector<double>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double sum = 0;
    for (std::size_t i = 0; i < z.size(); ++i) sum += p[i] = std::exp(z[i] - m);
    for (auto& v : p) v /= sum;
    return p;
  }

  /// Test accuracy; with a scheme, every layer input is fake-quantized to
  /// B_a bits (signed for the raw features, unsigned after ReLU).
  double accuracy(const nn::Mlp& m, const QuantScheme* scheme) const {
    int correct = 0;
    for (std::size_t s = 0; s < test_x_.size(); ++s) {
      std::vector<double> cur = test_x_[s];
      for (std::size_t l = 0; l < m.layers().size(); ++l) {
        if (scheme) {
          const int b = scheme->layers[l].b_a;
          const bool is_signed = l == 0;
          const double levels = is_signed ? (1 << (b - 1)) - 1 : (1 << b) - 1;
          const double step = input_max_[l] > 0 ? input_max_[l] / levels : 1.0;
          for (auto& v : cur)
            v = std::clamp<double>(static_cast<double>(round_half_away(v / step)), is_signed ? -levels - 1 : 0, levels) * step;
        }
        const auto& sh = m.layers()[l];
        std::vector<double> next(static_cast<std::size_t>(sh.out));
        for (int o = 0; o < sh.out; ++o) {
          double acc = m.params()[m.bias_index(l, o)];
          for (int i = 0; i < sh.in; ++i) acc += m.params()[m.weight_index(l, o, i)] * cur[static_cast<std::size_t>(i)];
          next[static_cast<std::size_t>(o)] = nn::activate(sh.act, acc);
        }
        cur = std::move(next);
      }
      const auto best = std::max_element(cur.begin(), cur.end()) - cur.begin();
      correct += best == test_y_[s];
    }
    return 100.0 * correct / static_cast<double>(test_x_.size());
  }

  NetworkSpec net_;
  nn::Mlp model_;
  std::vector<std::vector<double>> test_x_;
  std::vector<int> test_y_;
  std::vector<double> input_max_;
  double acc_b_ = 0;
};

inline std::vector<std::string> oracle_names() { return {"proxy", "mlp"}; }

inline std::unique_ptr<AccuracyOracle> make_oracle(std::string_view name, const NetworkSpec& net, std::uint64_t seed = 0) {
  if (name == "proxy") return std::make_unique<ProxyOracle>(net, seed);
  if (name == "mlp") return std::make_unique<MlpOracle>(net, seed);
  throw input_error("unknown accuracy oracle '" + std::string(name) + "' (known: proxy, mlp)");
}

}  // namespace n3h
