#include "arachne/simulation.hpp"

#include <ostream>
#include <sstream>

#include "arachne/angles.hpp"
#include "arachne/format.hpp"

namespace arachne::sim {

using controller::Mode;
using controller::MotionCommand;
using telemetry::Event;
using telemetry::EventKind;

namespace {

bool is_avoiding(Mode m) { return m == Mode::AvoidLeft || m == Mode::AvoidRight || m == Mode::AvoidBackward; }

std::string describe(const SetTask& t)
{
  std::ostringstream os;
  os << "goal (" << format_double(t.x) << ", " << format_double(t.y) << ") radius " << format_double(t.radius);
  return os.str();
}

}  // namespace

const char* to_string(Outcome o)
{
  switch (o) {
    case Outcome::Reached: return "reached";
    case Outcome::Idle: return "idle";
    case Outcome::TickBudgetExceeded: return "tick_budget_exceeded";
  }
  return "?";
}

Simulation::Simulation(const SimConfig& config, arena::WorldState world)
  : config_(config), world_(std::move(world)), rng_(config.seed), ticks_per_phase_(config.ticks_per_phase())
{
  for (gait::Direction d : {gait::Direction::Forward, gait::Direction::Left, gait::Direction::Right,
                            gait::Direction::Backward}) {
    plans_.emplace(d, gait::plan_cycle(config_.model, config_.gait, d));
  }
  world_.clock = 0.0;
  world_.tick = 0;
  pose_ = arena::start_pose(world_, config_.model.body.radius);
  phase_start_ = pose_;
  joints_ = gait::solve_legs(plans_.at(gait::Direction::Forward), 0, 0.0);
  frame_ = sensors::read_frame(world_, pose_, config_.sensors, rng_);
  in_contact_ = arena::disc_collides(world_, pose_.position(), pose_.radius);
  last_.pose = pose_;
  last_.frame = frame_;
  last_.joints = joints_;
  last_.collision = in_contact_;
  summary_.final_pose = pose_;
}

void Simulation::apply(const Command& cmd)
{
  if (const auto* t = std::get_if<SetTask>(&cmd)) {
    try {
      state_ = controller::handle_command(state_, cmd);
      pending_events_.push_back({EventKind::TaskAccepted, describe(*t)});
    } catch (const controller::RejectedCommand& e) {
      pending_events_.push_back({EventKind::TaskRejected, e.what()});
    }
  } else if (const auto* p = std::get_if<PlaceObstacle>(&cmd)) {
    try {
      arena::validate_obstacle(world_, p->shape, "place_obstacle.shape");
      arena::WorldState probe;
      probe.bounds = world_.bounds;
      probe.obstacles = {p->shape};
      if (arena::disc_collides(probe, pose_.position(), pose_.radius)) {
        throw arena::ValidationError("place_obstacle.shape", "shape overlaps the robot");
      }
      world_.obstacles.push_back(p->shape);
    } catch (const arena::ArenaError& e) {
      pending_events_.push_back({EventKind::ProtocolError, e.what()});
    }
  } else {
    // stop; set_rate only concerns publishers
    state_ = controller::handle_command(state_, cmd);
  }
}

void Simulation::start_phase_if_idle()
{
  if (moving_) {
    return;
  }
  const Mode before = state_.mode;
  const auto clear = sensors::side_clearances(world_, pose_, config_.sensors.ultrasonic.max_range);
  const auto res = controller::step(state_, frame_, clear, pose_, config_.controller);
  state_ = res.state;
  command_ = res.command;
  if (state_.mode == Mode::Reached && before != Mode::Reached) {
    pending_events_.push_back({EventKind::Reached, "arrived within the task radius"});
    summary_.reached = true;
  }
  if (is_avoiding(state_.mode) && !is_avoiding(before)) {
    ++summary_.avoid_intervals;
  }
  moving_ = controller::to_direction(command_);
  if (moving_) {
    phase_start_ = pose_;
    phase_tick_ = 0;
  }
}

const TickRecord& Simulation::tick(const std::vector<Command>& commands)
{
  for (const Command& c : commands) {
    apply(c);
  }
  start_phase_if_idle();

  const Eigen::Vector2d before = pose_.position();
  arena::AdvanceResult adv;
  if (moving_) {
    const gait::GaitPlan& plan = plans_.at(*moving_);
    ++phase_tick_;
    const double progress = static_cast<double>(phase_tick_) / ticks_per_phase_;
    adv = arena::advance(world_, phase_start_, &plan.phase(phase_counter_).body_motion, progress, config_.dt);
    joints_ = gait::solve_legs(plan, phase_counter_ % plan.phase_count(), progress);
    if (phase_tick_ == ticks_per_phase_) {
      moving_.reset();
      ++phase_counter_;
      ++summary_.phases;
    }
  } else {
    adv = arena::advance(world_, pose_, nullptr, 0.0, config_.dt);
  }
  pose_ = adv.pose;
  summary_.distance += (pose_.position() - before).norm();
  if (adv.collision && !in_contact_) {
    ++summary_.collisions;
    pending_events_.push_back({EventKind::Collision, "body overlaps an obstacle or the arena boundary"});
  }
  in_contact_ = adv.collision;
  frame_ = sensors::read_frame(world_, pose_, config_.sensors, rng_);

  last_.tick = world_.tick;
  last_.t_sim = world_.clock;
  last_.pose = pose_;
  last_.mode = state_.mode;
  last_.command = command_;
  last_.frame = frame_;
  last_.joints = joints_;
  last_.collision = adv.collision;
  last_.events = std::move(pending_events_);
  pending_events_.clear();

  summary_.ticks = world_.tick;
  summary_.final_pose = pose_;
  if (summary_.reached && !summary_.reached_at) {
    summary_.reached_at = world_.clock;
  }
  return last_;
}

bool Simulation::settled() const
{
  return !moving_ && (state_.mode == Mode::Idle || state_.mode == Mode::Reached);
}

telemetry::TickSnapshot Simulation::snapshot() const
{
  telemetry::TickSnapshot s;
  s.tick = last_.tick;
  s.t_sim = last_.t_sim;
  s.direction = last_.command;
  s.frame = last_.frame;
  s.pose = last_.pose;
  s.joints = last_.joints;
  s.events = last_.events;
  return s;
}

RunTrace run_sim(const SimConfig& config, const arena::WorldState& world, const CommandScript& script,
                 bool keep_records)
{
  Simulation sim(config, world);
  RunTrace trace;
  std::size_t next = 0;
  bool first = true;
  while (sim.summary().ticks < config.max_ticks) {
    std::vector<Command> due;
    if (first && config.task) {
      due.push_back(*config.task);
    }
    first = false;
    // Script times are compared in whole ticks so 0.1 s lands on tick 5 regardless of rounding.
    const auto now = static_cast<double>(sim.world().tick);
    while (next < script.size() && script[next].t_sim / config.dt <= now + 1e-9) {
      due.push_back(script[next++].command);
    }
    const TickRecord& rec = sim.tick(due);
    if (keep_records) {
      trace.records.push_back(rec);
    }
    if (next == script.size() && sim.settled()) {
      break;
    }
  }
  trace.summary = sim.summary();
  if (trace.summary.reached && sim.controller_state().mode == Mode::Reached) {
    trace.summary.outcome = Outcome::Reached;
  } else if (sim.settled() && next == script.size()) {
    trace.summary.outcome = Outcome::Idle;
  } else {
    trace.summary.outcome = Outcome::TickBudgetExceeded;
  }
  return trace;
}

RunTrace run_sim(const SimConfig& config)
{
  config.validate();
  const arena::WorldState world = arena::load_arena_file(config.arena_path);
  CommandScript script;
  if (config.script_path) {
    script = load_script(*config.script_path);
  }
  return run_sim(config, world, script);
}

namespace {

void write_pose(std::ostream& os, const arena::RobotPose& p)
{
  os << "\"x\":" << format_double(p.x) << ",\"y\":" << format_double(p.y)
     << ",\"heading_deg\":" << format_double(rad_to_deg(p.heading));
}

}  // namespace

std::string summary_json(const RunSummary& s)
{
  std::ostringstream os;
  os << "{\"ticks\":" << s.ticks << ",\"collisions\":" << s.collisions
     << ",\"reached\":" << (s.reached ? "true" : "false") << ",\"outcome\":\"" << to_string(s.outcome) << "\""
     << ",\"reached_at\":" << (s.reached_at ? format_double(*s.reached_at) : "null")
     << ",\"distance\":" << format_double(s.distance) << ",\"phases\":" << s.phases
     << ",\"cycles\":" << format_double(s.cycles()) << ",\"avoid_intervals\":" << s.avoid_intervals
     << ",\"final_pose\":{";
  write_pose(os, s.final_pose);
  os << "}}";
  return os.str();
}

void write_trace(const RunTrace& trace, std::ostream& os)
{
  for (const TickRecord& r : trace.records) {
    os << "{\"tick\":" << r.tick << ",\"t_sim\":" << format_double(r.t_sim) << ",";
    write_pose(os, r.pose);
    os << ",\"mode\":\"" << controller::to_string(r.mode) << "\",\"command\":\"" << controller::to_string(r.command)
       << "\",\"ultrasonic\":" << format_double(r.frame.ultrasonic.distance)
       << ",\"triggered\":" << (r.frame.ultrasonic.triggered ? "true" : "false")
       << ",\"smoke\":" << (r.frame.smoke ? "true" : "false")
       << ",\"temperature\":" << format_double(r.frame.temperature) << ",\"joints_deg\":[";
    for (std::size_t i = 0; i < 12; ++i) {
      os << (i ? "," : "") << format_double(rad_to_deg(r.joints[i / 3][i % 3]));
    }
    os << "],\"collision\":" << (r.collision ? "true" : "false") << ",\"events\":[";
    for (std::size_t i = 0; i < r.events.size(); ++i) {
      const std::string ev = telemetry::encode(telemetry::TelemetryMessage{0, 0.0, r.events[i]});
      // reuse the wire writer for escaping, keep only the data object
      const auto at = ev.find("\"data\":") + 7;
      os << (i ? "," : "") << ev.substr(at, ev.size() - at - 2);
    }
    os << "]}\n";
  }
  os << "{\"summary\":" << summary_json(trace.summary) << "}\n";
}

}  // namespace arachne::sim
