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

// DNN workload description: layer lists, im2col GEMM shapes and the
// built-in ResNet-18 / MobileNet-V2 / synthetic-small networks.
//
// Descriptor format (one record per line, see text_format.hpp):
//
//   network name=<id>
//   layer index=<1..> c_in= c_out= kernel= stride= padding= fmap=
//         [n_params=] [sc_or_dw=0|1] [depthwise=0|1] [first_or_last=0|1]
//
// n_params is derived when omitted and validated when present. A shortcut
// (projection) convolution is a 1x1 layer with sc_or_dw=1, depthwise=0.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "n3h/builtin_networks.hpp"
#include "n3h/common.hpp"
#include "n3h/text_format.hpp"

namespace n3h {

struct LayerSpec {
  int index = 1;  // 1-based
  int c_in = 1;
  int c_out = 1;  // filter count
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int fmap = 1;  // input spatial size (square)
  std::int64_t n_params = 1;
  bool is_sc_or_dw = false;
  bool is_depthwise = false;
  bool is_first_or_last = false;

  bool is_shortcut() const { return is_sc_or_dw && !is_depthwise; }

  std::int64_t expected_params() const {
    const std::int64_t per_filter = static_cast<std::int64_t>(is_depthwise ? 1 : c_in) * kernel * kernel;
    return per_filter * c_out;
  }

  int out_fmap(int pad) const { return (fmap + 2 * pad - kernel) / stride + 1; }
  int out_fmap() const { return out_fmap(padding); }

  /// Reduction length of one filter (per-channel for depthwise).
  int fan_in() const { return (is_depthwise ? 1 : c_in) * kernel * kernel; }

  std::int64_t macs() const {
    const std::int64_t o = out_fmap();
    return o * o * static_cast<std::int64_t>(c_out) * fan_in();
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
  std::string name;
  std::vector<LayerSpec> layers;

  std::size_t size() const { return layers.size(); }
  std::int64_t total_params() const {
    std::int64_t n = 0;
    for (const auto& l : layers) n += l.n_params;
    return n;
  }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct GemmShape {
  int rows = 1;   // output spatial positions
  int depth = 1;  // reduction length
  int cols = 1;   // filters

  std::int64_t macs() const { return static_cast<std::int64_t>(rows) * depth * cols; }
  friend bool operator==(const GemmShape&, const GemmShape&) = default;
};

inline GemmShape im2col_dims(const LayerSpec& layer, int padding) {
  const int o = layer.out_fmap(padding);
  return GemmShape{o * o, layer.fan_in(), layer.c_out};
}

inline GemmShape im2col_dims(const LayerSpec& layer) { return im2col_dims(layer, layer.padding); }

namespace detail {

inline void validate_layer(const LayerSpec& l, const std::string& where) {
  auto fail = [&](const std::string& why) { throw input_error(where + ": " + why); };
  if (l.c_in < 1 || l.c_out < 1 || l.kernel < 1 || l.stride < 1 || l.fmap < 1)
    fail("dimension fields must be >= 1");
  if (l.padding < 0) fail("padding must be >= 0");
  if (l.kernel > l.fmap + 2 * l.padding) fail("kernel larger than padded feature map");
  if (l.is_depthwise && !l.is_sc_or_dw) fail("depthwise layer must also set sc_or_dw=1");
  if (l.is_depthwise && l.c_in != l.c_out) fail("depthwise layer requires c_in == c_out");
  if (l.n_params != l.expected_params())
    fail("n_params=" + std::to_string(l.n_params) + " does not match c_out*c_in*d*d=" +
         std::to_string(l.expected_params()));
}

}  // namespace detail

/// Checks every NetworkSpec invariant; throws an input error naming the layer.
inline void validate(const NetworkSpec& net) {
  if (net.layers.empty()) throw input_error("network '" + net.name + "' has no layers");
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    const std::string where = "layer " + std::to_string(l.index);
    if (l.index != static_cast<int>(i) + 1)
      throw input_error(where + ": layer indices must be contiguous from 1 (expected " + std::to_string(i + 1) + ")");
    detail::validate_layer(l, where);
    if (l.is_first_or_last && i != 0 && i + 1 != net.layers.size())
      throw input_error(where + ": first_or_last set on an interior layer");
    if (i == 0) continue;
    const auto& prev = net.layers[i - 1];
    // Shortcut projections read the block input, not the previous layer.
    if (l.is_shortcut() || prev.is_shortcut()) continue;
    if (prev.c_out != l.c_in)
      throw input_error(where + ": c_in=" + std::to_string(l.c_in) + " does not match producer layer " +
                        std::to_string(prev.index) + " c_out=" + std::to_string(prev.c_out));
  }
}

inline NetworkSpec load_network(std::string_view descriptor_text) {
  NetworkSpec net;
  bool have_header = false;
  for (const auto& rec : text::parse(descriptor_text)) {
    if (rec.tag == "network") {
      if (have_header) throw input_error(rec.where() + ": duplicate network record");
      net.name = std::string(rec.require("name"));
      have_header = true;
    } else if (rec.tag == "layer") {
      LayerSpec l;
      l.index = static_cast<int>(rec.get_int("index"));
      l.c_in = static_cast<int>(rec.get_int("c_in"));
      l.c_out = static_cast<int>(rec.get_int("c_out"));
      l.kernel = static_cast<int>(rec.get_int("kernel"));
      l.stride = static_cast<int>(rec.get_int("stride"));
      l.padding = static_cast<int>(rec.get_int("padding"));
      l.fmap = static_cast<int>(rec.get_int("fmap"));
      l.is_sc_or_dw = rec.get_bool_or("sc_or_dw", false);
      l.is_depthwise = rec.get_bool_or("depthwise", false);
      l.is_first_or_last = rec.get_bool_or("first_or_last", false);
      l.n_params = rec.get_int_or("n_params", l.expected_params());
      try {
        detail::validate_layer(l, "layer " + std::to_string(l.index));
      } catch (const Error& e) {
        throw input_error(rec.where() + ": " + e.what());
      }
      net.layers.push_back(l);
    } else {
      throw input_error(rec.where() + ": unknown record tag '" + rec.tag + "'");
    }
  }
  if (!have_header) throw input_error("descriptor has no 'network' record");
  validate(net);
  return net;
}

inline std::string to_descriptor(const NetworkSpec& net) {
  std::string out = text::RecordWriter("network").add("name", net.name).str() + "\n";
  for (const auto& l : net.layers) {
    out += text::RecordWriter("layer")
               .add("index", l.index)
               .add("c_in", l.c_in)
               .add("c_out", l.c_out)
               .add("kernel", l.kernel)
               .add("stride", l.stride)
               .add("padding", l.padding)
               .add("fmap", l.fmap)
               .add("n_params", l.n_params)
               .add("sc_or_dw", l.is_sc_or_dw)
               .add("depthwise", l.is_depthwise)
               .add("first_or_last", l.is_first_or_last)
               .str();
    out += "\n";
  }
  return out;
}

inline std::vector<std::string> builtin_network_names() { return {"resnet18", "mobilenetv2", "synthetic-small"}; }

inline std::string_view builtin_descriptor(std::string_view name) {
  if (name == "resnet18") return builtin::kResNet18;
  if (name == "mobilenetv2") return builtin::kMobileNetV2;
  if (name == "synthetic-small") return builtin::kSyntheticSmall;
  throw input_error("unknown built-in network '" + std::string(name) + "' (expected resnet18, mobilenetv2 or synthetic-small)");
}

inline NetworkSpec builtin_network(std::string_view name) { return load_network(builtin_descriptor(name)); }

}  // namespace n3h
