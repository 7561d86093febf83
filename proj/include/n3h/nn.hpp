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

// Small dense networks with manual backpropagation and an Adam optimizer.
// Parameters are stored as one flat vector so that optimizers, soft updates
// and finite-difference checks treat every network the same way.

#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "n3h/common.hpp"

namespace n3h::nn {

enum class Activation { Linear, Tanh, Sigmoid, Relu };

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::Linear: return z;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::Relu: return z > 0 ? z : 0.0;
  }
  return z;
}

/// Derivative in terms of the pre-activation z and output y.
inline double activate_grad(Activation a, double z, double y) {
  switch (a) {
    case Activation::Linear: return 1.0;
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Sigmoid: return y * (1.0 - y);
    case Activation::Relu: return z > 0 ? 1.0 : 0.0;
  }
  return 1.0;
}

struct LayerShape {
  int in = 1;
  int out = 1;
  Activation act = Activation::Linear;
};

/// Values of every layer from one forward pass, kept for backward().
struct Tape {
  std::vector<std::vector<double>> inputs;  // input of each layer
  std::vector<std::vector<double>> pre;     // pre-activations
  std::vector<double> output;
};

/// Fully connected network. Layer l owns out*in weights (row-major, one row
/// per output) followed by out biases.
class Mlp {
 public:
  Mlp() = default;

  Mlp(std::vector<LayerShape> layers, std::uint64_t seed) : layers_(std::move(layers)) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      if (l > 0 && layers_[l].in != layers_[l - 1].out) throw input_error("layer widths do not chain");
      offsets_.push_back(n);
      n += static_cast<std::size_t>(layers_[l].out) * (layers_[l].in + 1);
    }
    params_.assign(n, 0.0);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& s = layers_[l];
      const double bound = std::sqrt(6.0 / (s.in + s.out));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (int o = 0; o < s.out; ++o)
        for (int i = 0; i < s.in; ++i) params_[weight_index(l, o, i)] = u(rng);
    }
  }

  int input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
  int output_size() const { return layers_.empty() ? 0 : layers_.back().out; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  std::size_t size() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::size_t weight_index(std::size_t l, int o, int i) const {
    return offsets_[l] + static_cast<std::size_t>(o) * layers_[l].in + static_cast<std::size_t>(i);
  }
  std::size_t bias_index(std::size_t l, int o) const {
    return offsets_[l] + static_cast<std::size_t>(layers_[l].out) * layers_[l].in + static_cast<std::size_t>(o);
  }

  std::vector<double> forward(std::span<const double> x) const {
    Tape t;
    forward(x, t);
    return t.output;
  }

  void forward(std::span<const double> x, Tape& tape) const {
    if (static_cast<int>(x.size()) != input_size()) throw input_error("network input has the wrong size");
    tape.inputs.assign(layers_.size(), {});
    tape.pre.assign(layers_.size(), {});
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& s = layers_[l];
      std::vector<double> z(static_cast<std::size_t>(s.out));
      std::vector<double> y(static_cast<std::size_t>(s.out));
      for (int o = 0; o < s.out; ++o) {
        double acc = params_[bias_index(l, o)];
        const double* w = &params_[weight_index(l, o, 0)];
        for (int i = 0; i < s.in; ++i) acc += w[i] * cur[static_cast<std::size_t>(i)];
        z[static_cast<std::size_t>(o)] = acc;
        y[static_cast<std::size_t>(o)] = activate(s.act, acc);
      }
      tape.inputs[l] = std::move(cur);
      tape.pre[l] = std::move(z);
      cur = std::move(y);
    }
    tape.output = std::move(cur);
  }

  /// Adds d(loss)/d(params) into `grad` given d(loss)/d(output); returns
  /// d(loss)/d(input).
  std::vector<double> backward(const Tape& tape, std::span<const double> d_out, std::vector<double>& grad) const {
    if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
    std::vector<double> delta(d_out.begin(), d_out.end());
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const auto& s = layers_[l];
      const auto& in = tape.inputs[l];
      const auto& z = tape.pre[l];
      std::vector<double> d_in(static_cast<std::size_t>(s.in), 0.0);
      for (int o = 0; o < s.out; ++o) {
        const auto oo = static_cast<std::size_t>(o);
        const double y = l + 1 < layers_.size() ? tape.inputs[l + 1][oo] : tape.output[oo];
        const double dz = delta[oo] * activate_grad(s.act, z[oo], y);
        if (dz == 0.0) continue;
        grad[bias_index(l, o)] += dz;
        const std::size_t w0 = weight_index(l, o, 0);
        for (int i = 0; i < s.in; ++i) {
          const auto ii = static_cast<std::size_t>(i);
          grad[w0 + ii] += dz * in[ii];
          d_in[ii] += dz * params_[w0 + ii];
        }
      }
      delta = std::move(d_in);
    }
    return delta;
  }

 private:
  std::vector<LayerShape> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// target <- tau * online + (1 - tau) * target
inline void soft_update(Mlp& target, const Mlp& online, double tau) {
  auto& t = target.params();
  const auto& o = online.params();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * o[i] + (1.0 - tau) * t[i];
}

class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

  /// One descent step on `params` along `grad`.
  void step(std::vector<double>& params, const std::vector<double>& grad) {
    if (m_.size() != params.size()) {
      m_.assign(params.size(), 0.0);
      v_.assign(params.size(), 0.0);
      t_ = 0;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, t_), c2 = 1.0 - std::pow(b2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = b1_ * m_[i] + (1 - b1_) * grad[i];
      v_[i] = b2_ * v_[i] + (1 - b2_) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
  }

  double learning_rate() const { return lr_; }

 private:
  double lr_, b1_, b2_, eps_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

}  // namespace n3h::nn
