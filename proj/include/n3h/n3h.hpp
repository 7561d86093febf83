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

#pragma once

#include "n3h/arch.hpp"
#include "n3h/common.hpp"
#include "n3h/cores.hpp"
#include "n3h/cost.hpp"
#include "n3h/dse.hpp"
#include "n3h/nn.hpp"
#include "n3h/oracle.hpp"
#include "n3h/quantize.hpp"
#include "n3h/report.hpp"
#include "n3h/sched.hpp"
#include "n3h/split.hpp"
#include "n3h/workload.hpp"
