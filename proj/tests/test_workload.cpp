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

#include "n3h/workload.hpp"
#include "test_util.hpp"

namespace n3h {
namespace {

std::string error_text(const std::string& descriptor) {
  try {
    load_network(descriptor);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Input);
    return e.what();
  }
  ADD_FAILURE() << "descriptor was accepted";
  return {};
}

TEST(LoadNetwork, MinimalSingleLayer) {
  auto net = load_network(
      "network name=tiny\n"
      "layer index=1 c_in=3 c_out=8 kernel=3 stride=1 padding=0 fmap=8\n");
  ASSERT_EQ(net.size(), 1u);
  const auto& l = net.layers[0];
  EXPECT_EQ(l.c_in, 3);
  EXPECT_EQ(l.c_out, 8);
  EXPECT_EQ(l.kernel, 3);
  EXPECT_EQ(l.stride, 1);
  EXPECT_EQ(l.fmap, 8);
  EXPECT_EQ(l.n_params, 8 * 3 * 3 * 3);
}

TEST(LoadNetwork, MissingFieldIsNamed) {
  const auto msg = error_text("network name=x\nlayer index=1 c_in=3 kernel=3 stride=1 padding=0 fmap=8\n");
  EXPECT_NE(msg.find("c_out"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(LoadNetwork, RejectsBadInput) {
  EXPECT_NE(error_text("layer index=1 c_in=3 c_out=8 kernel=3 stride=1 padding=0 fmap=8\n").find("network"),
            std::string::npos);
  EXPECT_NE(error_text("network name=x\nlayer index=1 c_in=3 c_out=8 kernel=3 stride=1 padding=0 fmap=8 n_params=5\n")
                .find("n_params"),
            std::string::npos);
  EXPECT_NE(error_text("network name=x\nlayer index=1 c_in=3 c_out=8 kernel=3 stride=0 padding=0 fmap=8\n").find(">= 1"),
            std::string::npos);
  EXPECT_NE(error_text("network name=x\n"
                       "layer index=1 c_in=3 c_out=8 kernel=3 stride=1 padding=1 fmap=8\n"
                       "layer index=2 c_in=9 c_out=8 kernel=3 stride=1 padding=1 fmap=8\n")
                .find("layer 2"),
            std::string::npos);
  EXPECT_NE(error_text("network name=x\n"
                       "layer index=1 c_in=3 c_out=8 kernel=3 stride=1 padding=1 fmap=8\n"
                       "layer index=3 c_in=8 c_out=8 kernel=3 stride=1 padding=1 fmap=8\n")
                .find("contiguous"),
            std::string::npos);
  EXPECT_NE(error_text("network name=x\nlayer index=1 c_in=3 c_out=8 kernel=3 stride=1 padding=0 fmap=8 c_in=4\n")
                .find("duplicate"),
            std::string::npos);
  EXPECT_NE(error_text("network name=x\nlayer index=1 c_in=three c_out=8 kernel=3 stride=1 padding=0 fmap=8\n")
                .find("not an integer"),
            std::string::npos);
}

TEST(LoadNetwork, CommentsAndBlankLines) {
  auto net = load_network(
      "# header\n\nnetwork name=c   # trailing\n"
      "layer index=1 c_in=1 c_out=1 kernel=1 stride=1 padding=0 fmap=1\n\n");
  EXPECT_EQ(net.name, "c");
  EXPECT_EQ(net.size(), 1u);
}

TEST(Im2col, ConvWithPadding) {
  LayerSpec l{.c_in = 3, .c_out = 16, .kernel = 3, .stride = 1, .padding = 1, .fmap = 8};
  EXPECT_EQ(im2col_dims(l, 1), (GemmShape{64, 27, 16}));
}

TEST(Im2col, PointwiseConv) {
  LayerSpec l{.c_in = 64, .c_out = 64, .kernel = 1, .stride = 1, .padding = 0, .fmap = 7};
  EXPECT_EQ(im2col_dims(l, 0), (GemmShape{49, 64, 64}));
}

TEST(Im2col, FullyConnected) {
  LayerSpec l{.c_in = 512, .c_out = 1000, .kernel = 1, .stride = 1, .padding = 0, .fmap = 1};
  EXPECT_EQ(im2col_dims(l, 0), (GemmShape{1, 512, 1000}));
}

TEST(Im2col, UnpaddedFormula) {
  LayerSpec l{.c_in = 4, .c_out = 2, .kernel = 3, .stride = 2, .padding = 0, .fmap = 11};
  // ((11 - 3) / 2 + 1)^2 = 25
  EXPECT_EQ(im2col_dims(l, 0).rows, 25);
}

TEST(Im2col, DepthwiseUsesPerChannelDepth) {
  LayerSpec l{.c_in = 32, .c_out = 32, .kernel = 3, .stride = 1, .padding = 1, .fmap = 112, .is_sc_or_dw = true,
              .is_depthwise = true};
  const auto g = im2col_dims(l);
  EXPECT_EQ(g.depth, 9);
  EXPECT_EQ(g.cols, 32);
}

TEST(Builtin, ResNet18) {
  auto net = builtin_network("resnet18");
  ASSERT_EQ(net.size(), 21u);
  EXPECT_TRUE(net.layers.front().is_first_or_last);
  EXPECT_TRUE(net.layers.back().is_first_or_last);
  for (std::size_t i = 1; i + 1 < net.size(); ++i) EXPECT_FALSE(net.layers[i].is_first_or_last);
  std::vector<int> shortcuts;
  for (const auto& l : net.layers)
    if (l.is_shortcut()) shortcuts.push_back(l.index);
  EXPECT_EQ(shortcuts, (std::vector<int>{8, 13, 18}));
  EXPECT_EQ(im2col_dims(net.layers.back()), (GemmShape{1, 512, 1000}));
  EXPECT_EQ(im2col_dims(net.layers.front()), (GemmShape{112 * 112, 147, 64}));
}

TEST(Builtin, MobileNetV2HasDepthwise) {
  auto net = builtin_network("mobilenetv2");
  const auto dw = std::count_if(net.layers.begin(), net.layers.end(), [](const LayerSpec& l) { return l.is_depthwise; });
  EXPECT_EQ(dw, 17);
  for (const auto& l : net.layers) {
    if (l.is_depthwise) {
      EXPECT_TRUE(l.is_sc_or_dw);
    }
  }
}

TEST(Builtin, SyntheticSmall) {
  auto net = builtin_network("synthetic-small");
  EXPECT_EQ(net.size(), 4u);
  EXPECT_LT(net.total_params(), 100000);
}

TEST(Builtin, UnknownName) {
  try {
    builtin_network("vgg16");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Input);
    EXPECT_NE(std::string(e.what()).find("vgg16"), std::string::npos);
  }
}

TEST(Builtin, DataFilesMatchEmbeddedDescriptors) {
  for (const auto& name : builtin_network_names())
    EXPECT_EQ(load_network(testing::read_file(testing::data_path("networks/" + name + ".net"))), builtin_network(name))
        << name;
}

// Oracle: independent MAC count from the convolution definition.
std::int64_t oracle_macs(const LayerSpec& l) {
  const std::int64_t out = (l.fmap + 2 * l.padding - l.kernel) / l.stride + 1;
  const std::int64_t per_output = (l.is_depthwise ? 1 : l.c_in) * l.kernel * l.kernel;
  return out * out * l.c_out * per_output;
}

TEST(Properties, GemmVolumeEqualsMacs) {
  for (const auto& name : builtin_network_names())
    for (const auto& l : builtin_network(name).layers) {
      const auto g = im2col_dims(l);
      EXPECT_EQ(g.macs(), oracle_macs(l)) << name << " layer " << l.index;
      EXPECT_EQ(l.n_params, l.expected_params());
    }
}

TEST(Properties, DescriptorRoundTrip) {
  for (const auto& name : builtin_network_names()) {
    const auto net = builtin_network(name);
    EXPECT_EQ(load_network(to_descriptor(net)), net) << name;
  }
}

}  // namespace
}  // namespace n3h
