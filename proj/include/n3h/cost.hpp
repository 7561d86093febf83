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

// Analytic resource models and device feasibility.
//
// Device database format:
//
//   device name=XC7Z020 dsp=220 lut=53200 bram36=140

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "n3h/arch.hpp"
#include "n3h/common.hpp"
#include "n3h/text_format.hpp"

namespace n3h {

struct DeviceProfile {
  std::string name;
  std::int64_t dsp_total = 1;
  std::int64_t lut_total = 1;
  std::int64_t bram36_total = 1;

  friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

inline constexpr std::string_view kBuiltinDeviceDb =
    "# name, DSP slices, LUTs, 36Kb block RAMs\n"
    "device name=XC7Z020 dsp=220 lut=53200 bram36=140\n"
    "device name=XC7Z045 dsp=900 lut=218600 bram36=545\n";

struct DeviceDb {
  std::vector<DeviceProfile> devices;

  const DeviceProfile& find(std::string_view name) const {
    for (const auto& d : devices)
      if (d.name == name) return d;
    std::string known;
    for (const auto& d : devices) known += (known.empty() ? "" : ", ") + d.name;
    throw input_error("unknown device '" + std::string(name) + "' (known: " + known + ")");
  }
};

inline DeviceDb load_device_db(std::string_view text) {
  DeviceDb db;
  for (const auto& rec : text::parse(text)) {
    if (rec.tag != "device") throw input_error(rec.where() + ": unknown record tag '" + rec.tag + "'");
    DeviceProfile d{std::string(rec.require("name")), rec.get_int("dsp"), rec.get_int("lut"), rec.get_int("bram36")};
    if (d.dsp_total < 1 || d.lut_total < 1 || d.bram36_total < 1)
      throw input_error(rec.where() + ": resource totals must be positive");
    for (const auto& other : db.devices)
      if (other.name == d.name) throw input_error(rec.where() + ": duplicate device '" + d.name + "'");
    db.devices.push_back(std::move(d));
  }
  if (db.devices.empty()) throw input_error("device database is empty");
  return db;
}

inline const DeviceDb& builtin_device_db() {
  static const DeviceDb db = load_device_db(kBuiltinDeviceDb);
  return db;
}

/// BRAM36 blocks of the DSP-core activation and weight buffers.
inline std::int64_t bram_dsp_core(const DspCoreGeometry& g) {
  const std::int64_t per_row = ceil_div<std::int64_t>(std::int64_t{g.n_reg_row_a} * 4, 32);
  return per_row * (std::int64_t{g.n_reg_col_a} * ceil_div<std::int64_t>(g.D_Dbuf_a, 1024) +
                    std::int64_t{g.n_reg_col_w} / 2 * ceil_div<std::int64_t>(g.D_Dbuf_w, 1024));
}

/// LUTs of the LUT-core: ceil(M*N*(1.17*K + 120.1 + 44.1) + 718), evaluated
/// exactly in hundredths.
inline std::int64_t lut_lut_core(std::int64_t M, std::int64_t K, std::int64_t N) {
  const std::int64_t hundredths = M * N * (117 * K + 12010 + 4410) + 71800;
  return ceil_div<std::int64_t>(hundredths, 100);
}

inline std::int64_t bram_lut_core(const LutCoreGeometry& g) {
  return ceil_div<std::int64_t>(g.K, 32) *
         (std::int64_t{g.M} * ceil_div<std::int64_t>(g.D_Lbuf_a, 1024) + std::int64_t{g.N} * ceil_div<std::int64_t>(g.D_Lbuf_w, 1024));
}

/// LUTs of the DSP-core control logic.
inline constexpr std::int64_t kDspCoreLuts = 1000;

struct ResourceReport {
  std::string device;
  std::int64_t lut_lut_core = 0;
  std::int64_t lut_used = 0;
  std::int64_t bram_lut_core = 0;
  std::int64_t bram_dsp_core = 0;
  std::int64_t bram_used = 0;
  std::int64_t dsp_used = 0;
  std::int64_t lut_margin = 0;
  std::int64_t bram_margin = 0;
  std::int64_t dsp_margin = 0;
  bool feasible = false;

  std::string violations() const {
    std::string out;
    auto add = [&](const char* what, std::int64_t margin) {
      if (margin < 0) out += (out.empty() ? "" : "; ") + std::string(what) + " over by " + std::to_string(-margin);
    };
    add("LUT", lut_margin);
    add("BRAM36", bram_margin);
    add("DSP", dsp_margin);
    return out;
  }
};

inline ResourceReport check_fit(const ArchConfig& cfg, const DeviceProfile& dev) {
  ResourceReport r;
  r.device = dev.name;
  r.lut_lut_core = lut_lut_core(cfg.lut.M, cfg.lut.K, cfg.lut.N);
  r.lut_used = r.lut_lut_core + kDspCoreLuts;
  r.bram_lut_core = bram_lut_core(cfg.lut);
  r.bram_dsp_core = bram_dsp_core(cfg.dsp);
  r.bram_used = r.bram_lut_core + r.bram_dsp_core;
  r.dsp_used = dev.dsp_total;
  r.lut_margin = dev.lut_total - r.lut_used;
  r.bram_margin = dev.bram36_total - r.bram_used;
  r.dsp_margin = dev.dsp_total - r.dsp_used;
  r.feasible = r.lut_margin >= 0 && r.bram_margin >= 0 && r.dsp_margin >= 0;
  return r;
}

}  // namespace n3h
