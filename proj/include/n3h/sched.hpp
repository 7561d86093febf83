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

// Instruction generation and pipeline simulation for one core and one layer.
//
// Each core runs three in-order engines (fetch, execute, result) that talk
// through token channels. Sync instructions send or receive one token; a
// receive blocks its engine until the matching send has completed. Latency
// is read off the execute engine:
//
//   total = l_wait + l_run + l_sig + l_rst
//
// where l_wait is time the execute engine spends blocked, l_run executing,
// l_sig sending tokens, and l_rst the tail after its last instruction.
//
// Timing model (all constants in Tunables):
//   - transfers move one 64-bit beat per cycle; per-row buffers fill in
//     parallel, so a LUT activation tile-row costs B_a * ceil(depth/64)
//     beats and a weight tile ceil(depth/64) beats; the DSP-core moves
//     ceil(depth/16) beats per activation tile-row and twice that per
//     weight strip;
//   - a LUT Execute handles one (activation plane, weight plane) pair of an
//     M x N output tile in ceil(depth/K) cycles;
//   - a DSP Execute handles one N_reg_row_a x 16 output tile in
//     ceil(depth/16) * (rows + weight_fill + drain) cycles;
//   - a Result costs result_cycles, a token send sync_cycles, a receive 0.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <sstream>
#include <string>
#include <vector>

#include "n3h/arch.hpp"
#include "n3h/common.hpp"
#include "n3h/workload.hpp"

namespace n3h {

enum class InstrKind : std::uint8_t { Fetch = 0, Execute = 1, Result = 2, Sync = 3 };
enum class CoreKind : std::uint8_t { Lut = 0, Dsp = 1 };
enum class BufferTarget : std::uint8_t { Activation = 0, Weight = 1, Output = 2, None = 3 };
enum class Engine : std::uint8_t { Fetch = 0, Execute = 1, Result = 2 };
inline constexpr int kEngineCount = 3;

/// Token channels; the value is the 3-bit flag of a Sync instruction.
enum class Token : std::uint8_t {
  Data = 0,         // fetch -> execute: a buffer slot was filled
  WeightFree = 1,   // execute -> fetch: a weight slot may be refilled
  ActFree = 2,      // execute -> fetch: an activation slot may be refilled
  ResultReady = 3,  // execute -> result: an output tile is complete
  ResultFree = 4,   // result -> execute: an output slot was drained
};
inline constexpr int kTokenCount = 5;

enum class EngineStatus : std::uint8_t { Idle, Run, WaitFetch, WaitExecute, WaitResult, Sync, Done };

inline const char* to_string(EngineStatus s) {
  switch (s) {
    case EngineStatus::Idle: return "IDLE";
    case EngineStatus::Run: return "RUN";
    case EngineStatus::WaitFetch: return "WF";
    case EngineStatus::WaitExecute: return "WE";
    case EngineStatus::WaitResult: return "WR";
    case EngineStatus::Sync: return "SYNC";
    case EngineStatus::Done: return "DONE";
  }
  return "?";
}

inline const char* to_string(Engine e) {
  switch (e) {
    case Engine::Fetch: return "fetch";
    case Engine::Execute: return "execute";
    case Engine::Result: return "result";
  }
  return "?";
}

inline const char* to_string(CoreKind c) { return c == CoreKind::Lut ? "LUT" : "DSP"; }

/// One instruction. Only the fields of its kind are meaningful; the others
/// stay zero so that decode(encode(x)) == x.
struct Instr {
  InstrKind kind = InstrKind::Sync;
  CoreKind core = CoreKind::Lut;
  BufferTarget target = BufferTarget::None;
  // Fetch / Result
  std::uint16_t buf_base = 0;
  std::uint8_t stage = 0;       // 3 bits
  bool range = false;           // 1 = write the on-chip buffer
  std::uint32_t ddr_base = 0;
  std::uint32_t ddr_offset = 0; // 24 bits
  std::uint16_t ddr_range = 0;  // beats
  std::uint32_t tile = 0;       // 24 bits, also used by Execute
  // Execute
  std::uint16_t act_addr = 0;
  std::uint16_t wgt_addr = 0;
  std::uint16_t rows = 0;
  std::uint16_t chunks = 0;
  std::uint8_t shift = 0;       // 4 bits
  bool negate = false;
  // Sync
  bool send = false;
  std::uint8_t next_state = 0;  // 2 bits
  Token token = Token::Data;

  friend bool operator==(const Instr&, const Instr&) = default;
};

using Word128 = std::array<std::uint64_t, 2>;  // {low, high}

namespace detail {

class BitWriter {
 public:
  void put(std::uint64_t v, int width, const char* field) {
    if (width < 64 && (v >> width) != 0)
      throw simulator_error(std::string("instruction field '") + field + "' does not fit " + std::to_string(width) + " bits");
    for (int b = 0; b < width; ++b, ++pos_)
      if ((v >> b) & 1u) w_[static_cast<std::size_t>(pos_ / 64)] |= std::uint64_t{1} << (pos_ % 64);
  }
  Word128 word() const { return w_; }

 private:
  Word128 w_{0, 0};
  int pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(Word128 w) : w_(w) {}
  std::uint64_t get(int width) {
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b, ++pos_) v |= ((w_[static_cast<std::size_t>(pos_ / 64)] >> (pos_ % 64)) & 1u) << b;
    return v;
  }

 private:
  Word128 w_;
  int pos_ = 0;
};

}  // namespace detail

/// Layout, LSB first: kind:2 core:1 target:2, then
///   Fetch/Result: buf_base:16 stage:3 range:1 ddr_base:32 ddr_offset:24 ddr_range:16 tile:24
///   Execute:      act_addr:16 wgt_addr:16 tile:24 rows:16 chunks:16 shift:4 negate:1
///   Sync:         send:1 next_state:2 token:3
inline Word128 encode(const Instr& in) {
  detail::BitWriter w;
  w.put(static_cast<std::uint64_t>(in.kind), 2, "kind");
  w.put(static_cast<std::uint64_t>(in.core), 1, "core");
  w.put(static_cast<std::uint64_t>(in.target), 2, "target");
  switch (in.kind) {
    case InstrKind::Fetch:
    case InstrKind::Result:
      w.put(in.buf_base, 16, "buf_base");
      w.put(in.stage, 3, "stage");
      w.put(in.range, 1, "range");
      w.put(in.ddr_base, 32, "ddr_base");
      w.put(in.ddr_offset, 24, "ddr_offset");
      w.put(in.ddr_range, 16, "ddr_range");
      w.put(in.tile, 24, "tile");
      break;
    case InstrKind::Execute:
      w.put(in.act_addr, 16, "act_addr");
      w.put(in.wgt_addr, 16, "wgt_addr");
      w.put(in.tile, 24, "tile");
      w.put(in.rows, 16, "rows");
      w.put(in.chunks, 16, "chunks");
      w.put(in.shift, 4, "shift");
      w.put(in.negate, 1, "negate");
      break;
    case InstrKind::Sync:
      w.put(in.send, 1, "send");
      w.put(in.next_state, 2, "next_state");
      w.put(static_cast<std::uint64_t>(in.token), 3, "token");
      break;
  }
  return w.word();
}

inline Instr decode(Word128 word) {
  detail::BitReader r(word);
  Instr in;
  in.kind = static_cast<InstrKind>(r.get(2));
  in.core = static_cast<CoreKind>(r.get(1));
  in.target = static_cast<BufferTarget>(r.get(2));
  switch (in.kind) {
    case InstrKind::Fetch:
    case InstrKind::Result:
      in.buf_base = static_cast<std::uint16_t>(r.get(16));
      in.stage = static_cast<std::uint8_t>(r.get(3));
      in.range = r.get(1) != 0;
      in.ddr_base = static_cast<std::uint32_t>(r.get(32));
      in.ddr_offset = static_cast<std::uint32_t>(r.get(24));
      in.ddr_range = static_cast<std::uint16_t>(r.get(16));
      in.tile = static_cast<std::uint32_t>(r.get(24));
      break;
    case InstrKind::Execute:
      in.act_addr = static_cast<std::uint16_t>(r.get(16));
      in.wgt_addr = static_cast<std::uint16_t>(r.get(16));
      in.tile = static_cast<std::uint32_t>(r.get(24));
      in.rows = static_cast<std::uint16_t>(r.get(16));
      in.chunks = static_cast<std::uint16_t>(r.get(16));
      in.shift = static_cast<std::uint8_t>(r.get(4));
      in.negate = r.get(1) != 0;
      break;
    case InstrKind::Sync:
      in.send = r.get(1) != 0;
      in.next_state = static_cast<std::uint8_t>(r.get(2));
      const auto t = r.get(3);
      if (t >= kTokenCount) throw simulator_error("sync instruction carries unknown token flag " + std::to_string(t));
      in.token = static_cast<Token>(t);
      break;
  }
  return in;
}

// ---------------------------------------------------------------------------
// Programs

struct Tunables {
  int cycles_per_beat = 1;
  int result_cycles = 4;
  int sync_cycles = 1;
  int dsp_weight_fill = 2;
  int dsp_drain = 1;
  int lut_weight_slots = 2;
  int result_slots = 2;
  int max_beats_per_transfer = 65535;

  friend bool operator==(const Tunables&, const Tunables&) = default;
};

struct InstrProgram {
  CoreKind core = CoreKind::Lut;
  int layer = 0;
  std::array<std::vector<Instr>, kEngineCount> queues;

  std::vector<Instr>& queue(Engine e) { return queues[static_cast<std::size_t>(e)]; }
  const std::vector<Instr>& queue(Engine e) const { return queues[static_cast<std::size_t>(e)]; }
  bool empty() const { return queues[0].empty() && queues[1].empty() && queues[2].empty(); }

  std::size_t count(InstrKind k) const {
    std::size_t n = 0;
    for (const auto& q : queues) n += static_cast<std::size_t>(std::count_if(q.begin(), q.end(), [&](const Instr& i) { return i.kind == k; }));
    return n;
  }
};

inline std::uint64_t instr_cycles(const Instr& in, const Tunables& t) {
  switch (in.kind) {
    case InstrKind::Fetch: return std::uint64_t{in.ddr_range} * static_cast<std::uint64_t>(t.cycles_per_beat);
    case InstrKind::Result: return static_cast<std::uint64_t>(t.result_cycles);
    case InstrKind::Execute:
      if (in.core == CoreKind::Lut) return in.chunks;
      return std::uint64_t{in.chunks} * (std::uint64_t{in.rows} + static_cast<std::uint64_t>(t.dsp_weight_fill + t.dsp_drain));
    case InstrKind::Sync: return in.send ? static_cast<std::uint64_t>(t.sync_cycles) : 0;
  }
  return 0;
}

/// Loop structure shared by both cores.
struct TilePlan {
  CoreKind core = CoreKind::Lut;
  int row_tiles = 0;
  int rows = 0;             // total output rows
  int rows_per_tile = 1;
  int col_tiles = 0;
  int weight_planes = 1;    // weight tiles per output tile
  int act_planes = 1;       // executes per weight tile
  int chunks = 1;           // Execute chunk count
  int act_beats = 0;        // per activation tile-row
  int weight_beats = 0;     // per weight tile
  int act_slots = 1;
  int weight_slots = 1;
  int result_slots = 2;

  int rows_in_tile(int r) const { return std::min(rows_per_tile, rows - r * rows_per_tile); }
};

/// Tiling for `shape.cols` columns on one core. Throws an infeasible error if
/// a buffer cannot hold one tile or the DSP-core is given >4-bit operands.
inline TilePlan plan_tiles(const GemmShape& shape, CoreKind core, const LayerBits& bits, const ArchConfig& cfg,
                           const Tunables& t) {
  TilePlan p;
  p.core = core;
  p.rows = shape.rows;
  p.result_slots = t.result_slots;
  if (core == CoreKind::Lut) {
    const auto& g = cfg.lut;
    p.rows_per_tile = g.M;
    p.row_tiles = ceil_div(shape.rows, g.M);
    p.col_tiles = ceil_div(shape.cols, g.N);
    p.weight_planes = bits.b_wl;
    p.act_planes = bits.b_a;
    p.chunks = ceil_div(shape.depth, g.K);
    const int words = ceil_div(shape.depth, 64);
    p.act_beats = bits.b_a * words;
    p.weight_beats = words;
    p.act_slots = g.D_Lbuf_a / (bits.b_a * p.chunks);
    p.weight_slots = t.lut_weight_slots;
    if (p.act_slots < 1)
      throw infeasible_error("LUT activation buffer (depth " + std::to_string(g.D_Lbuf_a) + ") cannot hold one tile-row of " +
                             std::to_string(bits.b_a * p.chunks) + " entries");
    if (t.lut_weight_slots * p.chunks > g.D_Lbuf_w)
      throw infeasible_error("LUT weight buffer (depth " + std::to_string(g.D_Lbuf_w) + ") cannot double-buffer tiles of " +
                             std::to_string(p.chunks) + " entries");
  } else {
    const auto& g = cfg.dsp;
    if (bits.b_a > kDspOperandBits)
      throw infeasible_error("DSP-core cannot run " + std::to_string(bits.b_a) + "-bit activations (max 4)");
    p.rows_per_tile = g.n_reg_row_a;
    p.row_tiles = ceil_div(shape.rows, g.n_reg_row_a);
    p.col_tiles = ceil_div(shape.cols, g.n_reg_col_w);
    p.weight_planes = 1;
    p.act_planes = 1;
    p.chunks = ceil_div(shape.depth, g.n_reg_col_a);
    p.act_beats = p.chunks;
    p.weight_beats = 2 * p.chunks;
    p.act_slots = g.D_Dbuf_a / p.chunks;
    p.weight_slots = g.D_Dbuf_w / (2 * p.chunks);
    if (p.act_slots < 1)
      throw infeasible_error("DSP activation buffer (depth " + std::to_string(g.D_Dbuf_a) + ") cannot hold one tile-row of " +
                             std::to_string(p.chunks) + " entries");
    if (p.weight_slots < 1)
      throw infeasible_error("DSP weight buffer (depth " + std::to_string(g.D_Dbuf_w) + ") cannot hold one strip of " +
                             std::to_string(2 * p.chunks) + " entries");
  }
  if (p.chunks > 0xFFFF) throw infeasible_error("reduction too deep for one Execute");
  return p;
}

namespace detail {

inline constexpr std::uint32_t kMask24 = 0xFFFFFF;
inline constexpr std::uint32_t kDdrActBase = 0x00000000;
inline constexpr std::uint32_t kDdrWeightBase = 0x40000000;
inline constexpr std::uint32_t kDdrOutputBase = 0x80000000;

inline Instr sync(CoreKind core, bool send, Token token, EngineStatus wait_status = EngineStatus::Run) {
  Instr i;
  i.kind = InstrKind::Sync;
  i.core = core;
  i.send = send;
  i.token = token;
  // next state: 0 run, 1 wait-fetch, 2 wait-execute, 3 wait-result
  i.next_state = send ? 0
                      : wait_status == EngineStatus::WaitFetch ? 1
                      : wait_status == EngineStatus::WaitExecute ? 2 : 3;
  return i;
}

/// Emits one logical transfer, split into pieces of at most max_beats.
inline void transfer(std::vector<Instr>& q, InstrKind kind, CoreKind core, BufferTarget target, std::uint32_t ddr_base,
                     std::uint64_t first_beat, std::uint64_t beats, std::uint32_t tile, std::uint32_t slot, int max_beats) {
  std::uint8_t stage = 0;
  do {
    const auto piece = static_cast<std::uint16_t>(std::min<std::uint64_t>(beats, static_cast<std::uint64_t>(max_beats)));
    Instr i;
    i.kind = kind;
    i.core = core;
    i.target = target;
    i.buf_base = static_cast<std::uint16_t>(slot);
    i.stage = stage;
    i.range = kind == InstrKind::Fetch;
    i.ddr_base = ddr_base;
    i.ddr_offset = static_cast<std::uint32_t>(first_beat & kMask24);  // wraps
    i.ddr_range = piece;
    i.tile = tile & kMask24;
    q.push_back(i);
    first_beat += piece;
    beats -= piece;
    stage = static_cast<std::uint8_t>((stage + 1) & 7);
  } while (beats > 0);
}

}  // namespace detail

/// Lazily generated program for one TilePlan. Each engine's queue is
/// produced one block at a time, so arbitrarily long programs run in
/// constant memory.
class ProgramStream {
 public:
  ProgramStream(const TilePlan& p, const Tunables& t, int layer = 0) : p_(p), layer_(layer), max_beats_(t.max_beats_per_transfer) {
    if (p.row_tiles == 0 || p.col_tiles == 0) return;
    G_ = std::int64_t{p.row_tiles} * p.col_tiles * p.weight_planes;
    Q_ = std::int64_t{p.row_tiles} * p.col_tiles;
    blocks_[0] = std::int64_t{p.row_tiles} * (1 + std::int64_t{p.col_tiles} * p.weight_planes);
    blocks_[1] = Q_;
    blocks_[2] = Q_;
  }

  CoreKind core() const { return p_.core; }
  int layer() const { return layer_; }

  /// Next instruction of engine e, or nullptr once its queue is exhausted.
  const Instr* peek(Engine e) {
    auto& c = cursors_[static_cast<std::size_t>(e)];
    while (c.pos == c.buf.size()) {
      if (c.next_block == blocks_[static_cast<std::size_t>(e)]) return nullptr;
      c.buf.clear();
      c.pos = 0;
      emit(e, c.next_block++, c.buf);
    }
    return &c.buf[c.pos];
  }
  void pop(Engine e) { ++cursors_[static_cast<std::size_t>(e)].pos; }

 private:
  struct Cursor {
    std::vector<Instr> buf;
    std::size_t pos = 0;
    std::int64_t next_block = 0;
  };

  void emit(Engine e, std::int64_t block, std::vector<Instr>& out) const {
    const CoreKind core = p_.core;
    const int C = p_.col_tiles, P = p_.weight_planes;
    if (e == Engine::Fetch) {
      const std::int64_t per_row = 1 + std::int64_t{C} * P;
      const int r = static_cast<int>(block / per_row);
      const std::int64_t slot = block % per_row;
      if (slot == 0) {
        if (r >= p_.act_slots) out.push_back(detail::sync(core, false, Token::ActFree, EngineStatus::WaitExecute));
        detail::transfer(out, InstrKind::Fetch, core, BufferTarget::Activation, detail::kDdrActBase,
                         std::uint64_t(r) * p_.act_beats, p_.act_beats, static_cast<std::uint32_t>(r),
                         static_cast<std::uint32_t>(r % p_.act_slots), max_beats_);
      } else {
        const std::int64_t g = r * (per_row - 1) + slot - 1;
        const auto wtile = static_cast<std::uint32_t>(slot - 1);  // c * P + j
        if (g >= p_.weight_slots) out.push_back(detail::sync(core, false, Token::WeightFree, EngineStatus::WaitExecute));
        detail::transfer(out, InstrKind::Fetch, core, BufferTarget::Weight, detail::kDdrWeightBase,
                         std::uint64_t(wtile) * p_.weight_beats, p_.weight_beats, wtile,
                         static_cast<std::uint32_t>(g % p_.weight_slots), max_beats_);
      }
      out.push_back(detail::sync(core, true, Token::Data));
      return;
    }
    const std::int64_t q = block;
    if (e == Engine::Execute) {
      const int r = static_cast<int>(q / C), c = static_cast<int>(q % C);
      const int rows = p_.rows_in_tile(r);
      if (c == 0) out.push_back(detail::sync(core, false, Token::Data, EngineStatus::WaitFetch));
      if (q >= p_.result_slots) out.push_back(detail::sync(core, false, Token::ResultFree, EngineStatus::WaitResult));
      for (int j = 0; j < P; ++j) {
        const std::int64_t g = q * P + j;
        out.push_back(detail::sync(core, false, Token::Data, EngineStatus::WaitFetch));
        for (int i = 0; i < p_.act_planes; ++i) {
          Instr x;
          x.kind = InstrKind::Execute;
          x.core = core;
          x.act_addr = static_cast<std::uint16_t>(((r % p_.act_slots) * p_.act_planes + i) * p_.chunks & 0xFFFF);
          x.wgt_addr = static_cast<std::uint16_t>((g % p_.weight_slots) * p_.chunks & 0xFFFF);
          x.tile = static_cast<std::uint32_t>(q) & detail::kMask24;
          x.rows = static_cast<std::uint16_t>(rows);
          x.chunks = static_cast<std::uint16_t>(p_.chunks);
          if (core == CoreKind::Lut) {
            x.shift = static_cast<std::uint8_t>(i + j);
            x.negate = j == P - 1;  // signed weight MSB plane
          }
          out.push_back(x);
        }
        if (g + p_.weight_slots < G_) out.push_back(detail::sync(core, true, Token::WeightFree));
      }
      out.push_back(detail::sync(core, true, Token::ResultReady));
      if (c == C - 1 && r + p_.act_slots < p_.row_tiles) out.push_back(detail::sync(core, true, Token::ActFree));
      return;
    }
    out.push_back(detail::sync(core, false, Token::ResultReady, EngineStatus::WaitExecute));
    detail::transfer(out, InstrKind::Result, core, BufferTarget::Output, detail::kDdrOutputBase, static_cast<std::uint64_t>(q), 1,
                     static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(q % p_.result_slots), max_beats_);
    if (q + p_.result_slots < Q_) out.push_back(detail::sync(core, true, Token::ResultFree));
  }

  TilePlan p_;
  int layer_;
  int max_beats_;
  std::int64_t G_ = 0, Q_ = 0;
  std::array<std::int64_t, kEngineCount> blocks_{0, 0, 0};
  std::array<Cursor, kEngineCount> cursors_;
};

inline InstrProgram gen_program(const TilePlan& p, const Tunables& t, int layer = 0) {
  InstrProgram prog;
  prog.core = p.core;
  prog.layer = layer;
  ProgramStream stream(p, t, layer);
  for (int e = 0; e < kEngineCount; ++e)
    while (const Instr* in = stream.peek(static_cast<Engine>(e))) {
      prog.queues[static_cast<std::size_t>(e)].push_back(*in);
      stream.pop(static_cast<Engine>(e));
    }
  return prog;
}

inline InstrProgram gen_program(const GemmShape& shape, const ArchConfig& cfg, const LayerBits& bits, CoreKind core,
                                const Tunables& t = {}, int layer = 0) {
  if (shape.cols == 0) {
    InstrProgram empty;
    empty.core = core;
    empty.layer = layer;
    return empty;
  }
  return gen_program(plan_tiles(shape, core, bits, cfg, t), t, layer);
}

// ---------------------------------------------------------------------------
// Simulation

struct LatencyBreakdown {
  std::uint64_t l_wait = 0;
  std::uint64_t l_run = 0;
  std::uint64_t l_sig = 0;
  std::uint64_t l_rst = 0;
  std::uint64_t total = 0;

  double total_ms() const { return cycles_to_ms(total); }
  friend bool operator==(const LatencyBreakdown&, const LatencyBreakdown&) = default;
};

struct TraceEvent {
  std::uint64_t cycle = 0;
  Engine engine = Engine::Fetch;
  EngineStatus status = EngineStatus::Idle;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct SimResult {
  LatencyBreakdown breakdown;
  std::array<std::uint64_t, kEngineCount> engine_end{0, 0, 0};
  std::vector<TraceEvent> trace;
};

inline bool belongs_to(InstrKind k, Engine e) {
  switch (k) {
    case InstrKind::Fetch: return e == Engine::Fetch;
    case InstrKind::Execute: return e == Engine::Execute;
    case InstrKind::Result: return e == Engine::Result;
    case InstrKind::Sync: return true;
  }
  return false;
}

inline EngineStatus wait_status(Token t, Engine e) {
  if (t == Token::Data) return EngineStatus::WaitFetch;
  if (t == Token::ResultFree) return EngineStatus::WaitResult;
  return e == Engine::Execute ? EngineStatus::WaitResult : EngineStatus::WaitExecute;
}

namespace detail {

/// Adapter giving a materialized program the stream interface.
class QueueSource {
 public:
  explicit QueueSource(const InstrProgram& p) : p_(p) {}
  CoreKind core() const { return p_.core; }
  int layer() const { return p_.layer; }
  const Instr* peek(Engine e) const {
    const auto& q = p_.queue(e);
    const auto i = pc_[static_cast<std::size_t>(e)];
    return i < q.size() ? &q[i] : nullptr;
  }
  void pop(Engine e) { ++pc_[static_cast<std::size_t>(e)]; }

 private:
  const InstrProgram& p_;
  std::array<std::size_t, kEngineCount> pc_{0, 0, 0};
};

/// Runs the three engines round-robin until every queue drains. A receive
/// whose token has not been sent yet stalls its engine; when no engine can
/// move, the program is deadlocked.
template <class Source>
SimResult run_engines(Source& src, const Tunables& t, bool record_trace) {
  SimResult res;
  std::array<std::deque<std::uint64_t>, kTokenCount> tokens;
  std::array<std::uint64_t, kEngineCount> now{0, 0, 0};
  std::array<std::uint64_t, kEngineCount> executed{0, 0, 0};
  std::array<EngineStatus, kEngineCount> last{EngineStatus::Done, EngineStatus::Done, EngineStatus::Done};
  auto mark = [&](int e, std::uint64_t cycle, EngineStatus s) {
    if (!record_trace || last[static_cast<std::size_t>(e)] == s) return;
    last[static_cast<std::size_t>(e)] = s;
    res.trace.push_back({cycle, static_cast<Engine>(e), s});
  };
  auto& b = res.breakdown;
  const int ex = static_cast<int>(Engine::Execute);

  for (int e = 0; e < kEngineCount; ++e) mark(e, 0, EngineStatus::Idle);
  while (true) {
    bool progressed = false, done = true;
    for (int e = 0; e < kEngineCount; ++e) {
      const auto eng = static_cast<Engine>(e);
      auto& t_e = now[static_cast<std::size_t>(e)];
      const Instr* in = nullptr;
      while ((in = src.peek(eng)) != nullptr) {
        if (in->kind == InstrKind::Sync && !in->send) {
          auto& ch = tokens[static_cast<std::size_t>(in->token)];
          if (ch.empty()) break;
          const std::uint64_t ready = ch.front();
          ch.pop_front();
          if (ready > t_e) {
            mark(e, t_e, wait_status(in->token, eng));
            if (e == ex) b.l_wait += ready - t_e;
            t_e = ready;
          }
        } else {
          const auto cost = instr_cycles(*in, t);
          if (in->kind == InstrKind::Sync) {
            mark(e, t_e, EngineStatus::Sync);
            if (e == ex) b.l_sig += cost;
            tokens[static_cast<std::size_t>(in->token)].push_back(t_e + cost);
          } else {
            mark(e, t_e, EngineStatus::Run);
            if (e == ex) b.l_run += cost;
          }
          t_e += cost;
        }
        src.pop(eng);
        ++executed[static_cast<std::size_t>(e)];
        progressed = true;
      }
      if (in != nullptr) done = false;
    }
    if (done) break;
    if (!progressed) {
      std::ostringstream msg;
      msg << "deadlock in " << to_string(src.core()) << "-core program of layer " << src.layer() << ":";
      for (int e = 0; e < kEngineCount; ++e)
        if (const Instr* in = src.peek(static_cast<Engine>(e)))
          msg << ' ' << to_string(static_cast<Engine>(e)) << " blocked at instruction " << executed[static_cast<std::size_t>(e)]
              << " waiting for token " << static_cast<int>(in->token) << " at cycle " << now[static_cast<std::size_t>(e)] << ';';
      throw simulator_error(msg.str());
    }
  }
  for (int e = 0; e < kEngineCount; ++e) mark(e, now[static_cast<std::size_t>(e)], EngineStatus::Done);
  res.engine_end = now;
  b.total = std::max({now[0], now[1], now[2]});
  b.l_rst = b.total - now[static_cast<std::size_t>(ex)];
  return res;
}

}  // namespace detail

inline SimResult simulate(const InstrProgram& prog, const Tunables& t = {}, bool record_trace = false) {
  // Token balance before running.
  std::array<std::int64_t, kTokenCount> balance{};
  for (int e = 0; e < kEngineCount; ++e)
    for (const auto& in : prog.queues[static_cast<std::size_t>(e)]) {
      if (!belongs_to(in.kind, static_cast<Engine>(e)))
        throw simulator_error(std::string("instruction kind not runnable on the ") + to_string(static_cast<Engine>(e)) + " engine");
      if (in.kind == InstrKind::Sync) balance[static_cast<std::size_t>(in.token)] += in.send ? 1 : -1;
    }
  for (int k = 0; k < kTokenCount; ++k)
    if (balance[static_cast<std::size_t>(k)] != 0)
      throw simulator_error("token imbalance on channel " + std::to_string(k) + ": " +
                            std::to_string(balance[static_cast<std::size_t>(k)]) + " unmatched");
  detail::QueueSource src(prog);
  return detail::run_engines(src, t, record_trace);
}

/// Simulates a generated program without materializing it.
inline SimResult simulate(const TilePlan& plan, const Tunables& t = {}, int layer = 0, bool record_trace = false) {
  ProgramStream src(plan, t, layer);
  return detail::run_engines(src, t, record_trace);
}

inline std::string trace_to_text(const std::vector<TraceEvent>& trace) {
  std::ostringstream out;
  for (const auto& ev : trace) out << ev.cycle << ' ' << to_string(ev.engine) << ' ' << to_string(ev.status) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Layer and network latency

inline LatencyBreakdown core_latency(const GemmShape& shape, const ArchConfig& cfg, const LayerBits& bits, CoreKind core,
                                     const Tunables& t = {}, int layer = 0) {
  if (shape.cols == 0) return {};
  return simulate(plan_tiles(shape, core, bits, cfg, t), t, layer).breakdown;
}

struct LayerLatency {
  int layer = 0;
  int lut_cols = 0;
  int dsp_cols = 0;
  LatencyBreakdown lut;
  LatencyBreakdown dsp;

  std::uint64_t cycles() const { return std::max(lut.total, dsp.total); }
  double ratio() const { return static_cast<double>(lut_cols) / (lut_cols + dsp_cols); }
};

/// Latency with `lut_cols` filters on the LUT-core and the rest on the DSP-core.
inline LayerLatency layer_latency_cols(const LayerSpec& layer, const ArchConfig& cfg, const LayerBits& bits, int lut_cols,
                                       const Tunables& t = {}) {
  if (lut_cols < 0 || lut_cols > layer.c_out) throw input_error("LUT column share outside the layer");
  const auto shape = im2col_dims(layer);
  LayerLatency out;
  out.layer = layer.index;
  out.lut_cols = lut_cols;
  out.dsp_cols = layer.c_out - lut_cols;
  out.lut = core_latency({shape.rows, shape.depth, out.lut_cols}, cfg, bits, CoreKind::Lut, t, layer.index);
  out.dsp = core_latency({shape.rows, shape.depth, out.dsp_cols}, cfg, bits, CoreKind::Dsp, t, layer.index);
  return out;
}

/// Layers with activations wider than the DSP operands run wholly on the
/// LUT-core whatever the ratio says.
inline int effective_lut_cols(const LayerSpec& layer, const LayerBits& bits, double ratio) {
  if (!(ratio >= 0 && ratio <= 1)) throw input_error("split ratio must be in [0, 1]");
  if (bits.b_a > kDspOperandBits) return layer.c_out;
  return lut_filter_count(ratio, layer.c_out);
}

inline LayerLatency layer_latency(const LayerSpec& layer, const ArchConfig& cfg, const LayerBits& bits, double ratio,
                                  const Tunables& t = {}) {
  return layer_latency_cols(layer, cfg, bits, effective_lut_cols(layer, bits, ratio), t);
}

/// Uses the bits and ratio the config assigns to this layer.
inline LayerLatency layer_latency(const LayerSpec& layer, const ArchConfig& cfg, const Tunables& t = {}) {
  const auto ratio = cfg.ratio_for(layer);
  if (!ratio) throw input_error("layer " + std::to_string(layer.index) + " has no split ratio");
  return layer_latency(layer, cfg, cfg.bits_for(layer), *ratio, t);
}

struct NetworkLatency {
  std::vector<LayerLatency> layers;
  std::uint64_t cycles = 0;

  double ms() const { return cycles_to_ms(cycles); }
};

inline NetworkLatency network_latency(const NetworkSpec& net, const ArchConfig& cfg, const Tunables& t = {}) {
  validate(cfg);
  cfg.scheme_for(net);
  NetworkLatency out;
  for (const auto& l : net.layers) {
    out.layers.push_back(layer_latency(l, cfg, t));
    out.cycles += out.layers.back().cycles();
  }
  return out;
}

}  // namespace n3h
