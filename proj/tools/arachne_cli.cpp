#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "arachne/arena.hpp"
#include "arachne/config.hpp"
#include "arachne/gait.hpp"
#include "arachne/sensor_report.hpp"
#include "arachne/simulation.hpp"
#include "arachne/telemetry/service.hpp"

using namespace arachne;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBind = 3;

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

struct Common {
  std::string config;
  std::string arena;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> ticks;
  std::string out;
};

SimConfig load(const Common& c, bool need_config)
{
  SimConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else if (need_config) {
    throw ConfigError("--config", "a config file is required");
  }
  if (!c.arena.empty()) {
    cfg.arena_path = c.arena;
  }
  if (c.seed) {
    cfg.seed = *c.seed;
  }
  if (c.ticks) {
    cfg.max_ticks = *c.ticks;
  }
  return cfg;
}

void write_file(const std::string& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  f << text;
}

int cmd_run(const Common& c)
{
  SimConfig cfg = load(c, true);
  const sim::RunTrace trace = sim::run_sim(cfg);
  if (!c.out.empty()) {
    std::ostringstream os;
    sim::write_trace(trace, os);
    write_file(c.out, os.str());
  }
  std::cout << sim::summary_json(trace.summary) << "\n";
  return 0;
}

int cmd_gait_csv(const Common& c, const std::string& direction, std::size_t cycles, std::size_t samples,
                 bool per_leg)
{
  SimConfig cfg = load(c, false);
  try {
    cfg.model.leg.validate();
    cfg.model.body.validate();
    cfg.gait.validate();
  } catch (const std::exception& e) {
    throw ConfigError("gait", e.what());
  }
  gait::Direction dir;
  try {
    dir = gait::direction_from_string(direction);
  } catch (const std::exception& e) {
    throw ConfigError("--direction", e.what());
  }
  const gait::GaitPlan plan = gait::plan_cycle(cfg.model, cfg.gait, dir);
  const gait::JointTrace trace = gait::joint_trace(plan, samples, cycles);
  if (per_leg) {
    if (c.out.empty()) {
      throw ConfigError("--out", "--per-leg needs --out as a file prefix");
    }
    // out.csv -> out_leg1.csv ... out_leg4.csv
    std::string prefix = c.out;
    if (prefix.size() > 4 && prefix.compare(prefix.size() - 4, 4, ".csv") == 0) {
      prefix.resize(prefix.size() - 4);
    }
    for (gait::LegId leg : gait::kAllLegs) {
      std::ostringstream os;
      gait::write_leg_csv(trace, leg, os);
      write_file(prefix + "_leg" + std::to_string(gait::number(leg)) + ".csv", os.str());
    }
    return 0;
  }
  std::ostringstream os;
  gait::write_joint_csv(trace, os);
  if (c.out.empty()) {
    std::cout << os.str();
  } else {
    write_file(c.out, os.str());
  }
  return 0;
}

int cmd_sensor_report(const Common& c, std::size_t trials)
{
  if (c.config.empty() && !c.seed) {
    throw ConfigError("--seed", "give --seed or a config file with a seed");
  }
  SimConfig cfg = load(c, false);
  if (trials < 1) {
    throw ConfigError("--trials", "must be at least 1");
  }
  try {
    cfg.sensors.validate();
  } catch (const std::exception& e) {
    throw ConfigError("sensors", e.what());
  }
  const SensorReport r = sensor_accuracy_report(cfg.sensors, cfg.model.body.radius, cfg.seed, trials);
  if (!c.out.empty()) {
    write_file(c.out, report_json(r));
  }
  std::cout << report_table(r);
  return 0;
}

int cmd_serve(const Common& c, std::uint16_t port, std::uint16_t ws_port, const std::string& address,
              bool no_throttle)
{
  SimConfig cfg = load(c, true);
  cfg.validate();
  const arena::WorldState world = arena::load_arena_file(cfg.arena_path);
  CommandScript script;
  if (cfg.script_path) {
    script = load_script(*cfg.script_path);
  }
  sim::Simulation simulation(cfg, world);
  telemetry::Scheduler scheduler(cfg.telemetry, cfg.dt);

  telemetry::ServiceOptions so;
  so.address = address;
  so.tcp_port = port;
  so.ws_port = ws_port;
  so.queue_limit = cfg.telemetry.queue_limit;
  telemetry::Service service(so);
  std::cerr << "telemetry: tcp " << address << ":" << service.tcp_port() << ", websocket ws://" << address << ":"
            << service.ws_port() << "/\n";

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  telemetry::ServeOptions opts;
  opts.throttle = !no_throttle;
  opts.stop = &g_interrupted;
  opts.max_ticks = c.ticks ? *c.ticks : 0;
  const sim::RunSummary summary = telemetry::serve_simulation(simulation, scheduler, &service, script, opts);
  service.flush();
  service.stop();
  std::cout << sim::summary_json(summary) << "\n";
  return 0;
}

int cmd_arena_validate(const std::vector<std::string>& files, const std::string& canonical_out)
{
  int status = 0;
  for (const auto& f : files) {
    try {
      const arena::WorldState w = arena::load_arena_file(f);
      std::cout << f << ": ok (" << w.obstacles.size() << " obstacles, " << w.smoke_sources.size()
                << " smoke sources, " << w.temperature.hot_spots.size() << " hot spots)\n";
      if (!canonical_out.empty()) {
        write_file(canonical_out, arena::save_arena(w));
      }
    } catch (const arena::ParseError& e) {
      std::cout << f << ": parse error at line " << e.line() << ", column " << e.column() << "\n";
      status = kExitConfig;
    } catch (const arena::ValidationError& e) {
      std::cout << f << ": invalid " << e.entity() << ": " << e.what() << "\n";
      status = kExitConfig;
    } catch (const arena::ArenaError& e) {
      std::cout << f << ": " << e.what() << "\n";
      status = kExitConfig;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"arachne: quadruped crawl-gait robot simulator"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool arena_flag) {
    sub->add_option("--config", common.config, "simulation config JSON");
    if (arena_flag) {
      sub->add_option("--arena", common.arena, "arena JSON (overrides the config)");
    }
    sub->add_option("--seed", common.seed, "random seed (overrides the config)");
    sub->add_option("--out", common.out, "output file");
  };

  auto* run = app.add_subcommand("run", "run a simulation to completion and write its trace");
  add_common(run, true);
  run->add_option("--ticks", common.ticks, "tick budget (overrides the config)");

  std::string direction = "forward";
  std::size_t cycles = 2;
  std::size_t samples = 25;
  bool per_leg = false;
  auto* csv = app.add_subcommand("gait-csv", "export joint-angle traces of one gait as CSV");
  add_common(csv, false);
  csv->add_option("--direction", direction, "forward, left, right or backward")->capture_default_str();
  csv->add_option("--cycles", cycles, "gait cycles")->capture_default_str()->check(CLI::PositiveNumber);
  csv->add_option("--samples", samples, "samples per phase")->capture_default_str()->check(CLI::PositiveNumber);
  csv->add_flag("--per-leg", per_leg, "write one CSV per leg using --out as prefix");

  std::size_t trials = 10000;
  auto* report = app.add_subcommand("sensor-report", "measure sensor accuracy against ground truth");
  add_common(report, false);
  report->add_option("--trials", trials, "trials per sensor")->capture_default_str();

  std::uint16_t port = 7411;
  std::uint16_t ws_port = 7412;
  std::string address = "127.0.0.1";
  bool no_throttle = false;
  auto* serve = app.add_subcommand("serve", "run a live simulation with the telemetry service");
  add_common(serve, true);
  serve->add_option("--port", port, "TCP port")->envname("ARACHNE_PORT")->capture_default_str();
  serve->add_option("--ws-port", ws_port, "WebSocket port")->envname("ARACHNE_WS_PORT")->capture_default_str();
  serve->add_option("--address", address, "listen address")->capture_default_str();
  serve->add_option("--ticks", common.ticks, "stop after this many ticks (default: until interrupted)");
  serve->add_flag("--no-throttle", no_throttle, "run as fast as possible instead of real time");

  std::vector<std::string> files;
  std::string canonical;
  auto* validate = app.add_subcommand("arena-validate", "check arena files");
  validate->add_option("files", files, "arena JSON files");
  validate->add_option("--arena", files, "arena JSON file");
  validate->add_option("--out", canonical, "write the canonical form of the (last) arena here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmd_run(common);
    if (csv->parsed()) return cmd_gait_csv(common, direction, cycles, samples, per_leg);
    if (report->parsed()) return cmd_sensor_report(common, trials);
    if (serve->parsed()) return cmd_serve(common, port, ws_port, address, no_throttle);
    if (validate->parsed()) {
      if (files.empty()) {
        std::cerr << "arena-validate: give at least one arena file\n";
        return kExitConfig;
      }
      return cmd_arena_validate(files, canonical);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const arena::ParseError& e) {
    std::cerr << "arena error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const arena::ArenaError& e) {
    std::cerr << "arena error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const telemetry::BindError& e) {
    std::cerr << "bind error: " << e.what() << "\n";
    return kExitBind;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
