// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <CLI11.hpp>

#include "arachne/angles.hpp"
#include "arachne/parallel.hpp"
#include "arachne/sensor_report.hpp"
#include "arachne/telemetry/service.hpp"

using namespace arachne;
namespace fs = std::filesystem;
namespace asio = boost::asio;
namespace beast = boost::beast;
using tcp = asio::ip::tcp;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail)
{
  std::printf("%s  %-22s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

template <typename... Args>
std::string fmt(const char* f, Args... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void kinematics_round_trip()
{
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = gait::default_model().leg;
  sensors::RandomStream rng(101);
  // Targets come from FK of random joints, so each one is reachable by construction.
  std::vector<kinematics::FootPosition> targets;
  while (targets.size() < 10000) {
    const kinematics::JointAngles q{rng.uniform(-kPi / 2, kPi / 2), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    if (g.l1 + g.l2 * std::cos(q.q2) + g.l3 * std::cos(q.q2 + q.q3) <= 1e-6) continue;
    targets.push_back(kinematics::foot_position(g, q));
  }
  double worst = 0.0;
  std::size_t solved = 0;
  for (auto branch : {kinematics::IkBranch::KneeDown, kinematics::IkBranch::KneeUp}) {
    for (const auto& t : targets) {
      const auto q = kinematics::try_inverse_kinematics(g, t, branch, false);
      if (!q) continue;
      ++solved;
      worst = std::max(worst, (kinematics::foot_position(g, *q).vector() - t.vector()).norm());
    }
  }
  const double tol = 1e-9 * g.total_length();
  const double elapsed = seconds_since(t0);
  report("kinematics_round_trip", solved == 2 * targets.size() && worst <= tol && elapsed < 5.0,
         fmt("%zu/%zu solved, max error %.3g m (limit %.3g), %.2f s", solved, 2 * targets.size(), worst, tol,
             elapsed));
}

void dh_composition()
{
  sensors::RandomStream rng(202);
  const auto g = gait::default_model().leg;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const kinematics::JointAngles q{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    kinematics::HomogeneousTransform chain;
    for (const auto& p : kinematics::leg_dh_chain(g, q)) chain = kinematics::compose(chain, kinematics::dh_transform(p));
    const auto closed = kinematics::leg_transform_closed_form(g, q);
    worst = std::max(worst, (chain.matrix() - closed.matrix()).cwiseAbs().maxCoeff());
  }
  // q3 = acos(c / (2 L2 L3)) as printed, against the corrected form on the same targets.
  int printed_fail = 0;
  int corrected_fail = 0;
  int n = 0;
  const double tol = 1e-9 * g.total_length();
  while (n < 1000) {
    const kinematics::JointAngles q{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(0.2, 2.5)};
    const auto t = kinematics::foot_position(g, q);
    const auto sol = kinematics::try_inverse_kinematics(g, t, kinematics::IkBranch::KneeDown, false);
    if (!sol) continue;
    ++n;
    const auto terms = kinematics::ik_terms(g, t);
    kinematics::JointAngles printed = *sol;
    printed.q3 = std::acos(std::clamp(terms.c / (2 * g.l2 * g.l3), -1.0, 1.0));
    corrected_fail += (kinematics::foot_position(g, *sol).vector() - t.vector()).norm() > tol;
    printed_fail += (kinematics::foot_position(g, printed).vector() - t.vector()).norm() > tol;
  }
  report("dh_composition", worst <= 1e-12 && corrected_fail == 0 && printed_fail > n / 2,
         fmt("max element diff %.3g; printed q3 fails %d/%d, corrected fails %d/%d", worst, printed_fail, n,
             corrected_fail, n));
}

void gait_invariants()
{
  const auto model = gait::default_model();
  const gait::GaitConfig cfg;
  const std::size_t samples = 25;
  const std::size_t cycles = 10;
  bool one_swing = true;
  bool partition = true;
  double periodic = 0.0;
  for (auto dir : {gait::Direction::Forward, gait::Direction::Left, gait::Direction::Right, gait::Direction::Backward}) {
    const auto plan = gait::plan_cycle(model, cfg, dir);
    for (std::size_t ph = 0; ph < plan.phase_count() * cycles; ++ph) {
      for (std::size_t i = 0; i <= samples; ++i) {
        int swinging = 0;
        for (auto leg : gait::kAllLegs) {
          swinging += gait::in_swing(plan, ph, leg);
          const double x = gait::foot_in_body(plan, ph, leg, static_cast<double>(i) / samples).x();
          partition = partition && plan.partition[gait::index(leg)].contains(x, 1e-12);
        }
        one_swing = one_swing && swinging == 1;
      }
    }
    const auto trace = gait::joint_trace(plan, samples, cycles);
    const std::size_t per_cycle = samples * plan.phase_count();
    for (std::size_t k = per_cycle; k < trace.size(); ++k) {
      for (std::size_t leg = 0; leg < 4; ++leg) {
        for (std::size_t j = 0; j < 3; ++j) {
          periodic = std::max(periodic, std::abs(trace.joints[k][leg][j] - trace.joints[k % per_cycle][leg][j]));
        }
      }
    }
  }
  const auto fwd = gait::plan_cycle(model, cfg, gait::Direction::Forward);
  const gait::LegId expected[] = {gait::LegId::Leg1, gait::LegId::Leg3, gait::LegId::Leg4, gait::LegId::Leg2};
  bool order = fwd.phase_count() == 4;
  for (std::size_t i = 0; order && i < 4; ++i) order = fwd.phase(i).swing_leg == expected[i];
  report("gait_invariants", one_swing && partition && order && periodic <= 1e-9,
         fmt("one swing leg %s, order 1-3-4-2 %s, partition %s, periodicity %.3g rad", one_swing ? "yes" : "no",
             order ? "yes" : "no", partition ? "yes" : "no", periodic));
}

void controller_runs()
{
  std::vector<scenario::Scenario> scenarios;
  for (std::uint64_t i = 0; i < 100; ++i) scenarios.push_back(scenario::random_scenario(1000 + i));
  std::string detail;
  bool ok = true;
  for (bool noisy : {false, true}) {
    SimConfig base;
    base.seed = 4242;
    if (!noisy) base.sensors = sensors::SensorSuite::noiseless();
    const auto runs = parallel::batch_runs(base, scenarios, parallel::Exec::Parallel);
    std::uint64_t collisions = 0;
    int reached = 0;
    for (const auto& r : runs) {
      collisions += r.collisions;
      reached += r.reached;
    }
    ok = ok && collisions == 0 && reached >= 95;
    detail += fmt("%s: %d/100 reached, %llu collisions; ", noisy ? "default noise" : "noiseless", reached,
                  static_cast<unsigned long long>(collisions));
  }
  // obstacle-free liveness: one meter at one stride per cycle, plus four cycles
  arena::WorldState room;
  room.bounds = {{0, 0}, {3, 2}};
  room.robot_start = {0.5, 1.0, 0.0};
  SimConfig c;
  c.seed = 1;
  c.task = SetTask{1.5, 1.0, 0.08};
  const auto s = sim::run_sim(c, room, {}, false).summary;
  const double bound = 1.0 / c.gait.stride_length + 4.0;
  ok = ok && s.reached && s.collisions == 0 && s.cycles() <= bound;
  detail += fmt("1 m goal in %.2f cycles (bound %.1f)", s.cycles(), bound);
  report("controller", ok, detail);
}

void sensor_aggregates()
{
  const sensors::SensorSuite suite;
  const auto r = sensor_accuracy_report(suite, gait::default_model().body.radius, 9001, 10000);
  const double p = suite.ultrasonic.detection_probability;
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(r.ultrasonic_trials));
  const bool ok = r.temperature_max_relative_error < 0.05 && r.ultrasonic_detection_rate >= 0.95 &&
                  std::abs(r.ultrasonic_detection_rate - p) <= 3 * sigma && r.smoke_detection_rate == 1.0 &&
                  r.ultrasonic_trials == 10000 && r.smoke_exposures > 0;
  report("sensor_aggregates", ok,
         fmt("temperature max rel err %.4f; ultrasonic %.4f (%.2f +/- %.4f); smoke %.4f over %zu exposures",
             r.temperature_max_relative_error, r.ultrasonic_detection_rate, p, 3 * sigma, r.smoke_detection_rate,
             r.smoke_exposures));
}

std::vector<std::string> read_tcp(tcp::socket& s)
{
  std::vector<std::string> out;
  asio::streambuf buf;
  for (;;) {
    boost::system::error_code ec;
    const std::size_t n = asio::read_until(s, buf, '\n', ec);
    if (ec) return out;
    out.emplace_back(asio::buffers_begin(buf.data()), asio::buffers_begin(buf.data()) + n);
    buf.consume(n);
  }
}

std::vector<std::string> read_ws(beast::websocket::stream<tcp::socket>& ws)
{
  std::vector<std::string> out;
  for (;;) {
    beast::flat_buffer b;
    boost::system::error_code ec;
    ws.read(b, ec);
    if (ec) return out;
    std::istringstream is(beast::buffers_to_string(b.data()));
    for (std::string l; std::getline(is, l);) out.push_back(l + "\n");
  }
}

void telemetry_run()
{
  arena::WorldState room = arena::load_arena(R"({"bounds":{"min":[0,0],"max":[4,3]},
    "obstacles":[{"type":"circle","center":[1.5,1.5],"radius":0.2}],"robot_start":{"x":0.5,"y":1.5}})");
  SimConfig c;
  c.seed = 8;
  c.task = SetTask{3.5, 1.5, 0.08};
  const std::uint64_t ticks = static_cast<std::uint64_t>(std::llround(10.0 / c.dt));

  auto run = [&](telemetry::Service* service) {
    sim::Simulation simulation(c, room);
    telemetry::Scheduler scheduler(c.telemetry, c.dt);
    std::vector<arena::RobotPose> poses;
    telemetry::ServeOptions opts;
    opts.throttle = false;
    opts.max_ticks = ticks;
    opts.on_tick = [&](const sim::TickRecord& r) { poses.push_back(r.pose); };
    telemetry::serve_simulation(simulation, scheduler, service, {}, opts);
    return poses;
  };

  telemetry::ServiceOptions so;
  so.tcp_port = 0;
  so.ws_port = 0;
  so.log = [](const std::string&) {};
  telemetry::Service service(so);
  asio::io_context io;
  tcp::socket tcp_client(io);
  tcp_client.connect({asio::ip::make_address("127.0.0.1"), service.tcp_port()});
  beast::websocket::stream<tcp::socket> ws_client(io);
  beast::get_lowest_layer(ws_client).connect({asio::ip::make_address("127.0.0.1"), service.ws_port()});
  ws_client.handshake("127.0.0.1", "/");
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (service.client_count() < 2 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  std::vector<std::string> tcp_lines;
  std::vector<std::string> ws_lines;
  std::thread a([&] { tcp_lines = read_tcp(tcp_client); });
  std::thread b([&] { ws_lines = read_ws(ws_client); });
  const auto with_clients = run(&service);
  service.flush();
  service.stop();
  a.join();
  b.join();
  const auto without = run(nullptr);

  int temps[2] = {0, 0};
  bool seq_ok = true;
  bool roundtrip = true;
  const std::vector<std::string>* streams[2] = {&tcp_lines, &ws_lines};
  for (int k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < streams[k]->size(); ++i) {
      const std::string& line = (*streams[k])[i];
      const auto m = telemetry::decode_message(line);
      temps[k] += std::holds_alternative<telemetry::Temperature>(m.data);
      seq_ok = seq_ok && m.seq == i;
      roundtrip = roundtrip && telemetry::encode(m) == line;
    }
  }
  // generated corpus, one message of each type per round
  sensors::RandomStream rng(33);
  std::size_t corpus = 0;
  for (int i = 0; i < 2000; ++i) {
    telemetry::Joints j;
    for (double& d : j.degrees) d = telemetry::quantize(rng.uniform(-180, 180));
    const telemetry::Payload payloads[] = {
      telemetry::Temperature{telemetry::quantize(rng.uniform(-20, 80))},
      telemetry::Smoke{rng.uniform() < 0.5},
      telemetry::DirectionChange{static_cast<controller::MotionCommand>(i % 5)},
      telemetry::Pose{telemetry::quantize(rng.normal()), telemetry::quantize(rng.normal()),
                      telemetry::quantize(rng.uniform(-180, 180))},
      j,
      telemetry::Event{static_cast<telemetry::EventKind>(i % 5), "detail \"" + std::to_string(i) + "\"\n"}};
    for (const auto& p : payloads) {
      const telemetry::TelemetryMessage m{static_cast<std::uint64_t>(i), telemetry::quantize(0.02 * i), p};
      const std::string line = telemetry::encode(m);
      const auto back = telemetry::decode_message(line);
      roundtrip = roundtrip && back == m && telemetry::encode(back) == line;
      ++corpus;
    }
  }
  bool same_path = with_clients.size() == without.size();
  for (std::size_t i = 0; same_path && i < without.size(); ++i) {
    same_path = with_clients[i].x == without[i].x && with_clients[i].y == without[i].y &&
                with_clients[i].heading == without[i].heading;
  }
  const bool ok = temps[0] == 20 && temps[1] == 20 && seq_ok && roundtrip && same_path && !tcp_lines.empty();
  report("telemetry", ok,
         fmt("%llu ticks; temperature msgs tcp=%d ws=%d; seq gap-free %s; round trip over %zu+%zu msgs %s; "
             "trajectory 0 vs 2 clients %s",
             static_cast<unsigned long long>(ticks), temps[0], temps[1], seq_ok ? "yes" : "no", corpus,
             tcp_lines.size() + ws_lines.size(), roundtrip ? "ok" : "broken", same_path ? "identical" : "differs"));
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(const std::string& cli, const fs::path& source, const fs::path& work)
{
  if (cli.empty()) {
    report("determinism", false, "no --cli given");
    return;
  }
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string cfg = (source / "configs" / "cluttered.json").string();
  struct Job {
    std::string name;
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Job> jobs = {
    {"run", "run --config " + cfg + " --out {}/trace.jsonl", {"trace.jsonl"}},
    {"run-seed", "run --config " + cfg + " --seed 99 --out {}/trace.jsonl", {"trace.jsonl"}},
    {"sensor-report", "sensor-report --config " + cfg + " --trials 20000 --out {}/report.json", {"report.json"}},
    {"gait-csv", "gait-csv --direction left --cycles 3 --out {}/gait.csv", {"gait.csv"}},
    {"gait-csv-legs", "gait-csv --direction forward --cycles 3 --per-leg --out {}/gait.csv",
     {"gait_leg1.csv", "gait_leg2.csv", "gait_leg3.csv", "gait_leg4.csv"}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& job : jobs) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = work / (job.name + "_" + std::to_string(rep));
      fs::create_directories(dir);
      std::string args = job.args;
      for (std::size_t at; (at = args.find("{}")) != std::string::npos;) args.replace(at, 2, dir.string());
      const std::string cmd = "\"" + cli + "\" " + args + " > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        detail += job.name + " failed to run; ";
        break;
      }
      std::string all;
      for (const auto& f : job.files) {
        if (!fs::exists(dir / f)) {
          ok = false;
          detail += job.name + " missing " + f + "; ";
        }
        all += slurp(dir / f);
      }
      all += slurp(dir / "stdout.txt");
      if (rep == 0) {
        first = all;
      } else if (all != first || first.empty()) {
        ok = false;
        detail += job.name + " differs; ";
      }
    }
  }
  report("determinism", ok, detail.empty() ? "run, run --seed, sensor-report, gait-csv, gait-csv --per-leg byte-identical twice" : detail);
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"acceptance checks"};
  std::string cli;
  std::string source = ".";
  std::string work = (fs::temp_directory_path() / "arachne_acceptance").string();
  app.add_option("--cli", cli, "path to the arachne executable");
  app.add_option("--source", source, "repository root");
  app.add_option("--work", work, "scratch directory");
  CLI11_PARSE(app, argc, argv);

  kinematics_round_trip();
  dh_composition();
  gait_invariants();
  controller_runs();
  sensor_aggregates();
  telemetry_run();
  determinism(cli, source, work);
  std::printf("%s: %d failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
