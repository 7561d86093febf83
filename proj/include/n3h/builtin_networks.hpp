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

// Built-in network descriptors. data/networks/*.net carry identical text.

#pragma once

#include <string_view>

namespace n3h::builtin {

inline constexpr std::string_view kResNet18 = R"net(network name=resnet18
layer index=1 c_in=3 c_out=64 kernel=7 stride=2 padding=3 fmap=224 n_params=9408 sc_or_dw=0 depthwise=0 first_or_last=1
layer index=2 c_in=64 c_out=64 kernel=3 stride=1 padding=1 fmap=56 n_params=36864 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=3 c_in=64 c_out=64 kernel=3 stride=1 padding=1 fmap=56 n_params=36864 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=4 c_in=64 c_out=64 kernel=3 stride=1 padding=1 fmap=56 n_params=36864 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=5 c_in=64 c_out=64 kernel=3 stride=1 padding=1 fmap=56 n_params=36864 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=6 c_in=64 c_out=128 kernel=3 stride=2 padding=1 fmap=56 n_params=73728 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=7 c_in=128 c_out=128 kernel=3 stride=1 padding=1 fmap=28 n_params=147456 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=8 c_in=64 c_out=128 kernel=1 stride=2 padding=0 fmap=56 n_params=8192 sc_or_dw=1 depthwise=0 first_or_last=0
layer index=9 c_in=128 c_out=128 kernel=3 stride=1 padding=1 fmap=28 n_params=147456 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=10 c_in=128 c_out=128 kernel=3 stride=1 padding=1 fmap=28 n_params=147456 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=11 c_in=128 c_out=256 kernel=3 stride=2 padding=1 fmap=28 n_params=294912 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=12 c_in=256 c_out=256 kernel=3 stride=1 padding=1 fmap=14 n_params=589824 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=13 c_in=128 c_out=256 kernel=1 stride=2 padding=0 fmap=28 n_params=32768 sc_or_dw=1 depthwise=0 first_or_last=0
layer index=14 c_in=256 c_out=256 kernel=3 stride=1 padding=1 fmap=14 n_params=589824 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=15 c_in=256 c_out=256 kernel=3 stride=1 padding=1 fmap=14 n_params=589824 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=16 c_in=256 c_out=512 kernel=3 stride=2 padding=1 fmap=14 n_params=1179648 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=17 c_in=512 c_out=512 kernel=3 stride=1 padding=1 fmap=7 n_params=2359296 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=18 c_in=256 c_out=512 kernel=1 stride=2 padding=0 fmap=14 n_params=131072 sc_or_dw=1 depthwise=0 first_or_last=0
layer index=19 c_in=512 c_out=512 kernel=3 stride=1 padding=1 fmap=7 n_params=2359296 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=20 c_in=512 c_out=512 kernel=3 stride=1 padding=1 fmap=7 n_params=2359296 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=21 c_in=512 c_out=1000 kernel=1 stride=1 padding=0 fmap=1 n_params=512000 sc_or_dw=0 depthwise=0 first_or_last=1
)net";

inline constexpr std::string_view kMobileNetV2 = R"net(network name=mobilenetv2
layer index=1 c_in=3 c_out=32 kernel=3 stride=2 padding=1 fmap=224 n_params=864 sc_or_dw=0 depthwise=0 first_or_last=1
layer index=2 c_in=32 c_out=32 kernel=3 stride=1 padding=1 fmap=112 n_params=288 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=3 c_in=32 c_out=16 kernel=1 stride=1 padding=0 fmap=112 n_params=512 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=4 c_in=16 c_out=96 kernel=1 stride=1 padding=0 fmap=112 n_params=1536 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=5 c_in=96 c_out=96 kernel=3 stride=2 padding=1 fmap=112 n_params=864 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=6 c_in=96 c_out=24 kernel=1 stride=1 padding=0 fmap=56 n_params=2304 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=7 c_in=24 c_out=144 kernel=1 stride=1 padding=0 fmap=56 n_params=3456 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=8 c_in=144 c_out=144 kernel=3 stride=1 padding=1 fmap=56 n_params=1296 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=9 c_in=144 c_out=24 kernel=1 stride=1 padding=0 fmap=56 n_params=3456 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=10 c_in=24 c_out=144 kernel=1 stride=1 padding=0 fmap=56 n_params=3456 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=11 c_in=144 c_out=144 kernel=3 stride=2 padding=1 fmap=56 n_params=1296 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=12 c_in=144 c_out=32 kernel=1 stride=1 padding=0 fmap=28 n_params=4608 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=13 c_in=32 c_out=192 kernel=1 stride=1 padding=0 fmap=28 n_params=6144 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=14 c_in=192 c_out=192 kernel=3 stride=1 padding=1 fmap=28 n_params=1728 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=15 c_in=192 c_out=32 kernel=1 stride=1 padding=0 fmap=28 n_params=6144 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=16 c_in=32 c_out=192 kernel=1 stride=1 padding=0 fmap=28 n_params=6144 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=17 c_in=192 c_out=192 kernel=3 stride=1 padding=1 fmap=28 n_params=1728 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=18 c_in=192 c_out=32 kernel=1 stride=1 padding=0 fmap=28 n_params=6144 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=19 c_in=32 c_out=192 kernel=1 stride=1 padding=0 fmap=28 n_params=6144 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=20 c_in=192 c_out=192 kernel=3 stride=2 padding=1 fmap=28 n_params=1728 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=21 c_in=192 c_out=64 kernel=1 stride=1 padding=0 fmap=14 n_params=12288 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=22 c_in=64 c_out=384 kernel=1 stride=1 padding=0 fmap=14 n_params=24576 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=23 c_in=384 c_out=384 kernel=3 stride=1 padding=1 fmap=14 n_params=3456 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=24 c_in=384 c_out=64 kernel=1 stride=1 padding=0 fmap=14 n_params=24576 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=25 c_in=64 c_out=384 kernel=1 stride=1 padding=0 fmap=14 n_params=24576 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=26 c_in=384 c_out=384 kernel=3 stride=1 padding=1 fmap=14 n_params=3456 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=27 c_in=384 c_out=64 kernel=1 stride=1 padding=0 fmap=14 n_params=24576 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=28 c_in=64 c_out=384 kernel=1 stride=1 padding=0 fmap=14 n_params=24576 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=29 c_in=384 c_out=384 kernel=3 stride=1 padding=1 fmap=14 n_params=3456 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=30 c_in=384 c_out=64 kernel=1 stride=1 padding=0 fmap=14 n_params=24576 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=31 c_in=64 c_out=384 kernel=1 stride=1 padding=0 fmap=14 n_params=24576 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=32 c_in=384 c_out=384 kernel=3 stride=1 padding=1 fmap=14 n_params=3456 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=33 c_in=384 c_out=96 kernel=1 stride=1 padding=0 fmap=14 n_params=36864 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=34 c_in=96 c_out=576 kernel=1 stride=1 padding=0 fmap=14 n_params=55296 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=35 c_in=576 c_out=576 kernel=3 stride=1 padding=1 fmap=14 n_params=5184 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=36 c_in=576 c_out=96 kernel=1 stride=1 padding=0 fmap=14 n_params=55296 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=37 c_in=96 c_out=576 kernel=1 stride=1 padding=0 fmap=14 n_params=55296 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=38 c_in=576 c_out=576 kernel=3 stride=1 padding=1 fmap=14 n_params=5184 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=39 c_in=576 c_out=96 kernel=1 stride=1 padding=0 fmap=14 n_params=55296 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=40 c_in=96 c_out=576 kernel=1 stride=1 padding=0 fmap=14 n_params=55296 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=41 c_in=576 c_out=576 kernel=3 stride=2 padding=1 fmap=14 n_params=5184 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=42 c_in=576 c_out=160 kernel=1 stride=1 padding=0 fmap=7 n_params=92160 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=43 c_in=160 c_out=960 kernel=1 stride=1 padding=0 fmap=7 n_params=153600 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=44 c_in=960 c_out=960 kernel=3 stride=1 padding=1 fmap=7 n_params=8640 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=45 c_in=960 c_out=160 kernel=1 stride=1 padding=0 fmap=7 n_params=153600 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=46 c_in=160 c_out=960 kernel=1 stride=1 padding=0 fmap=7 n_params=153600 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=47 c_in=960 c_out=960 kernel=3 stride=1 padding=1 fmap=7 n_params=8640 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=48 c_in=960 c_out=160 kernel=1 stride=1 padding=0 fmap=7 n_params=153600 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=49 c_in=160 c_out=960 kernel=1 stride=1 padding=0 fmap=7 n_params=153600 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=50 c_in=960 c_out=960 kernel=3 stride=1 padding=1 fmap=7 n_params=8640 sc_or_dw=1 depthwise=1 first_or_last=0
layer index=51 c_in=960 c_out=320 kernel=1 stride=1 padding=0 fmap=7 n_params=307200 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=52 c_in=320 c_out=1280 kernel=1 stride=1 padding=0 fmap=7 n_params=409600 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=53 c_in=1280 c_out=1000 kernel=1 stride=1 padding=0 fmap=1 n_params=1280000 sc_or_dw=0 depthwise=0 first_or_last=1
)net";

inline constexpr std::string_view kSyntheticSmall = R"net(network name=synthetic-small
layer index=1 c_in=3 c_out=16 kernel=3 stride=1 padding=1 fmap=16 n_params=432 sc_or_dw=0 depthwise=0 first_or_last=1
layer index=2 c_in=16 c_out=32 kernel=3 stride=2 padding=1 fmap=16 n_params=4608 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=3 c_in=32 c_out=64 kernel=3 stride=1 padding=1 fmap=8 n_params=18432 sc_or_dw=0 depthwise=0 first_or_last=0
layer index=4 c_in=64 c_out=10 kernel=1 stride=1 padding=0 fmap=1 n_params=640 sc_or_dw=0 depthwise=0 first_or_last=1
)net";

}  // namespace n3h::builtin
