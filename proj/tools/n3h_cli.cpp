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

// n3h: resource, latency, split and exploration reports.
//
// Exit codes: 0 success, 1 infeasible or constraint failure, 2 input error,
// 3 internal simulator error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "n3h/n3h.hpp"

namespace {

using namespace n3h;
using report::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInput = 2;
constexpr int kExitSimulator = 3;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Output {
  std::string out;  // JSONL destination
  bool json = false;

  void emit(const report::Jsonl& lines, const std::string& human) const {
    if (!out.empty()) {
      std::ofstream f(out, std::ios::binary);
      if (!f) throw input_error("cannot write '" + out + "'");
      f << lines.str();
    }
    std::cout << (json ? lines.str() : human);
  }
};

NetworkSpec load_network_arg(const std::string& arg, report::RunManifest& m) {
  if (std::filesystem::is_regular_file(arg)) {
    const auto text = read_text(arg);
    m.add_input(arg, text);
    return load_network(text);
  }
  const auto text = std::string(builtin_descriptor(arg));
  m.add_input("builtin:" + arg, text);
  return load_network(text);
}

ArchConfig load_config_arg(const std::string& path, report::RunManifest& m) {
  const auto text = read_text(path);
  m.add_input(path, text);
  return parse_arch_config(text);
}

DeviceDb load_devices(const std::string& flag, report::RunManifest& m) {
  std::string path = flag;
  if (path.empty())
    if (const char* env = std::getenv("N3H_DEVICE_DB")) path = env;
  if (path.empty()) return builtin_device_db();
  const auto text = read_text(path);
  m.add_input(path, text);
  return load_device_db(text);
}

report::RunManifest manifest(const std::string& command) {
  report::RunManifest m;
  m.command = command;
  m.timestamp = report::manifest_timestamp();
  return m;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

struct CostArgs {
  std::string config, device, device_db;
  bool strict = false;
};

int cmd_cost(const CostArgs& a, const Output& o) {
  auto m = manifest("cost");
  const auto cfg = load_config_arg(a.config, m);
  const auto db = load_devices(a.device_db, m);
  const auto& dev = db.find(a.device.empty() ? cfg.device : a.device);
  const auto r = check_fit(cfg, dev);

  report::Jsonl lines;
  lines.add(report::to_json(m));
  lines.add(report::to_json(r));
  const auto ranges = range_violations(cfg);
  for (const auto& v : ranges) lines.add({{"record", "range_warning"}, {"message", v}});

  std::string h = fmt("device %s\n", dev.name.c_str());
  h += fmt("%-6s %10s %10s %10s\n", "", "used", "available", "margin");
  h += fmt("%-6s %10lld %10lld %10lld\n", "LUT", (long long)r.lut_used, (long long)dev.lut_total, (long long)r.lut_margin);
  h += fmt("%-6s %10lld %10lld %10lld\n", "BRAM36", (long long)r.bram_used, (long long)dev.bram36_total, (long long)r.bram_margin);
  h += fmt("%-6s %10lld %10lld %10lld\n", "DSP", (long long)r.dsp_used, (long long)dev.dsp_total, (long long)r.dsp_margin);
  h += r.feasible ? "feasible\n" : "infeasible: " + r.violations() + "\n";
  for (const auto& v : ranges) h += "warning: " + v + "\n";
  o.emit(lines, h);
  return a.strict && !r.feasible ? kExitInfeasible : kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string network, config;
  bool trace = false;
};

int cmd_simulate(const SimulateArgs& a, const Output& o) {
  auto m = manifest("simulate");
  const auto net = load_network_arg(a.network, m);
  const auto cfg = complete_ratios(net, load_config_arg(a.config, m));
  const Tunables t;
  const auto lat = network_latency(net, cfg, t);

  report::Jsonl lines;
  lines.add(report::to_json(m));
  std::string h = fmt("%-5s %6s %6s %7s %12s %12s %12s\n", "layer", "LUT", "DSP", "ratio", "L_LUT", "L_DSP", "cycles");
  for (const auto& l : lat.layers) {
    lines.add(report::to_json(l));
    h += fmt("%-5d %6d %6d %7.4f %12llu %12llu %12llu\n", l.layer, l.lut_cols, l.dsp_cols, l.ratio(), (unsigned long long)l.lut.total,
             (unsigned long long)l.dsp.total, (unsigned long long)l.cycles());
  }
  lines.add({{"record", "total"}, {"network", net.name}, {"cycles", lat.cycles}, {"ms", lat.ms()}});
  h += fmt("total %llu cycles, %.6f ms\n", (unsigned long long)lat.cycles, lat.ms());

  if (a.trace) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      const auto& l = net.layers[i];
      const auto shape = im2col_dims(l);
      const auto bits = cfg.bits_for(l);
      for (auto core : {CoreKind::Lut, CoreKind::Dsp}) {
        const int cols = core == CoreKind::Lut ? lat.layers[i].lut_cols : lat.layers[i].dsp_cols;
        if (cols == 0) continue;
        const auto res = simulate(plan_tiles({shape.rows, shape.depth, cols}, core, bits, cfg, t), t, l.index, true);
        for (const auto& ev : res.trace) {
          lines.add({{"record", "trace"},
                     {"layer", l.index},
                     {"core", to_string(core)},
                     {"cycle", ev.cycle},
                     {"engine", to_string(ev.engine)},
                     {"status", to_string(ev.status)}});
          h += fmt("trace layer=%d core=%s cycle=%llu engine=%s status=%s\n", l.index, to_string(core), (unsigned long long)ev.cycle,
                   to_string(ev.engine), to_string(ev.status));
        }
      }
    }
  }
  o.emit(lines, h);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SplitArgs {
  std::string network, config, save_config;
  bool scan = true;
  bool concurrent = false;
};

int cmd_split(const SplitArgs& a, const Output& o) {
  auto m = manifest("split");
  const auto net = load_network_arg(a.network, m);
  const auto cfg = load_config_arg(a.config, m);
  const auto scheme = cfg.scheme_for(net);
  const Tunables t;
  const auto plan = plan_network(net, cfg, scheme, t, a.concurrent);

  report::Jsonl lines;
  lines.add(report::to_json(m));
  std::string h = fmt("%-5s %6s %6s %7s %5s %12s %12s %12s\n", "layer", "c_out", "LUT", "ratio", "note", "L_LUT", "L_DSP", "cycles");
  for (std::size_t i = 0; i < plan.layers.size(); ++i) {
    const auto& s = plan.layers[i];
    lines.add(report::to_json(s));
    if (a.scan) lines.add_all(report::scan_json(s.layer, ratio_scan(net.layers[i], cfg, s.bits, t)));
    h += fmt("%-5d %6d %6d %7.4f %5s %12llu %12llu %12llu\n", s.layer, s.c_out, s.lut_cols, s.ratio(), s.forced_zero ? "dw0" : "",
             (unsigned long long)s.latency.lut.total, (unsigned long long)s.latency.dsp.total, (unsigned long long)s.cycles());
  }
  lines.add({{"record", "total"}, {"network", net.name}, {"cycles", plan.cycles}, {"ms", plan.ms()}});
  h += fmt("total %llu cycles, %.6f ms\n", (unsigned long long)plan.cycles, plan.ms());
  if (std::any_of(plan.layers.begin(), plan.layers.end(), [](const LayerSplit& l) { return l.forced_zero; }))
    h += "dw0: depthwise layer kept on the DSP-core\n";
  if (!a.save_config.empty()) {
    std::ofstream f(a.save_config, std::ios::binary);
    if (!f) throw input_error("cannot write '" + a.save_config + "'");
    f << to_config_text(apply_plan(cfg, scheme, plan));
  }
  o.emit(lines, h);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ExploreArgs {
  std::string settings, network, device, strategy, oracle, device_db, save_config;
  double target_ms = 0;
  int episodes = -1;
  long long seed = -1;
  double acc_b = -1;
  bool strict = false;
};

int cmd_explore(const ExploreArgs& a, const Output& o) {
  auto m = manifest("explore");
  ExploreSettings s;
  if (!a.settings.empty()) {
    const auto text = read_text(a.settings);
    m.add_input(a.settings, text);
    s = parse_explore_settings(text);
  }
  if (!a.network.empty()) s.network = a.network;
  if (!a.device.empty()) s.device = a.device;
  if (a.target_ms > 0) s.target_ms = a.target_ms;
  if (a.episodes >= 0) s.episodes = a.episodes;
  if (!a.strategy.empty()) s.strategy = parse_strategy(a.strategy);
  if (a.seed >= 0) s.seed = static_cast<std::uint64_t>(a.seed);
  if (!a.oracle.empty()) s.oracle = a.oracle;
  if (a.acc_b >= 0) s.acc_b = a.acc_b;
  if (s.network.empty()) throw input_error("no network given (--network or settings file)");
  if (s.device.empty()) throw input_error("no device given (--device or settings file)");
  if (!(s.target_ms > 0)) throw input_error("no positive latency target given (--target-ms or settings file)");
  m.seed = s.seed;

  const auto net = load_network_arg(s.network, m);
  const auto db = load_devices(a.device_db, m);
  const auto oracle = make_oracle(s.oracle, net, s.seed);
  ExploreEnv env;
  env.net = net;
  env.device = db.find(s.device);
  env.target_ms = s.target_ms;
  env.oracle = oracle.get();
  env.acc_baseline = s.acc_b;
  const auto res = explore(env, s.episodes, s.strategy, s.seed);

  report::Jsonl lines;
  lines.add(report::to_json(m));
  lines.add({{"record", "settings"},
             {"network", net.name},
             {"device", env.device.name},
             {"target_ms", s.target_ms},
             {"episodes", s.episodes},
             {"strategy", to_string(s.strategy)},
             {"seed", s.seed},
             {"oracle", oracle->name()},
             {"acc_b", env.acc_b()}});
  int feasible = 0;
  for (const auto& e : res.history) {
    lines.add(report::episode_json(e));
    feasible += e.point.feasible;
  }
  std::string h = fmt("%s on %s, %s, %d episodes, %d feasible\n", net.name.c_str(), env.device.name.c_str(), to_string(s.strategy),
                      s.episodes, feasible);
  if (res.best) {
    const auto& b = *res.best;
    ordered_json j = report::to_json(b);
    j["record"] = "best";
    lines.add(j);
    lines.add_all(report::best_layers_json(net, b));
    h += fmt("best reward %.6f, latency %.6f ms (target %.6f), accuracy %.3f (baseline %.3f)\n", b.reward, b.latency_ms, s.target_ms,
             b.accuracy, env.acc_b());
    h += to_config_text(b.config);
    if (!a.save_config.empty()) {
      std::ofstream f(a.save_config, std::ios::binary);
      if (!f) throw input_error("cannot write '" + a.save_config + "'");
      f << to_config_text(b.config);
    }
  } else {
    h += "no feasible design found\n";
  }
  o.emit(lines, h);
  return a.strict && !res.best ? kExitInfeasible : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n3h: heterogeneous DSP/LUT accelerator design-space tools"};
  app.set_version_flag("--version", std::string(report::kToolVersion));
  app.require_subcommand(1);
  Output out;
  auto add_output = [&](CLI::App* c) {
    c->add_option("--out", out.out, "write the JSON-lines report to this file");
    c->add_flag("--json", out.json, "print the JSON-lines report instead of the table");
  };
  const std::string db_help = "device database file (default: $N3H_DEVICE_DB, else built-in)";

  CostArgs cost;
  auto* c_cost = app.add_subcommand("cost", "resource estimate and device fit of a config");
  c_cost->add_option("--config", cost.config, "accelerator config")->required();
  c_cost->add_option("--device", cost.device, "device name (default: the config's)");
  c_cost->add_option("--device-db", cost.device_db, db_help);
  c_cost->add_flag("--strict", cost.strict, "exit 1 when the config does not fit");
  add_output(c_cost);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "per-layer latency of a network on a config");
  c_sim->add_option("--network", sim.network, "built-in network name or descriptor file")->required();
  c_sim->add_option("--config", sim.config, "accelerator config; layers without a ratio get the optimal split")->required();
  c_sim->add_flag("--trace", sim.trace, "emit the engine status log of every simulated core");
  add_output(c_sim);

  SplitArgs split;
  bool no_scan = false;
  auto* c_split = app.add_subcommand("split", "optimal per-layer LUT/DSP split with ratio scans");
  c_split->add_option("--network", split.network, "built-in network name or descriptor file")->required();
  c_split->add_option("--config", split.config, "accelerator config with bit-widths")->required();
  c_split->add_flag("--no-scan", no_scan, "skip the per-layer ratio scan");
  c_split->add_flag("--concurrent", split.concurrent, "plan layers in parallel");
  c_split->add_option("--save-config", split.save_config, "write the config with the planned ratios");
  add_output(c_split);

  ExploreArgs ex;
  auto* c_ex = app.add_subcommand("explore", "search hardware knobs, bit-widths and splits");
  c_ex->add_option("--config", ex.settings, "exploration settings file");
  c_ex->add_option("--network", ex.network, "built-in network name or descriptor file");
  c_ex->add_option("--device", ex.device, "device name");
  c_ex->add_option("--device-db", ex.device_db, db_help);
  c_ex->add_option("--target-ms", ex.target_ms, "latency target in ms");
  c_ex->add_option("--episodes", ex.episodes, "number of episodes");
  c_ex->add_option("--strategy", ex.strategy, "ddpg or random");
  c_ex->add_option("--seed", ex.seed, "random seed");
  c_ex->add_option("--oracle", ex.oracle, "accuracy oracle: proxy or mlp");
  c_ex->add_option("--acc-b", ex.acc_b, "baseline accuracy in percent (default: the oracle's full-precision figure)");
  c_ex->add_option("--save-config", ex.save_config, "write the best config");
  c_ex->add_flag("--strict", ex.strict, "exit 1 when no feasible design is found");
  add_output(c_ex);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (c_cost->parsed()) return cmd_cost(cost, out);
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_split->parsed()) {
      split.scan = !no_scan;
      return cmd_split(split, out);
    }
    if (c_ex->parsed()) return cmd_explore(ex, out);
  } catch (const Error& e) {
    std::cerr << "n3h: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Input: return kExitInput;
      case ErrorKind::Infeasible: return kExitInfeasible;
      case ErrorKind::Simulator: return kExitSimulator;
    }
  } catch (const std::exception& e) {
    std::cerr << "n3h: internal error: " << e.what() << '\n';
    return kExitSimulator;
  }
  return kExitOk;
}
