#include "arachne/controller.hpp"

#include <cmath>

namespace arachne {

const char* command_name(const Command& cmd)
{
  struct Name {
    const char* operator()(const SetTask&) const { return "set_task"; }
    const char* operator()(const PlaceObstacle&) const { return "place_obstacle"; }
    const char* operator()(const Stop&) const { return "stop"; }
    const char* operator()(const SetRate&) const { return "set_rate"; }
  };
  return std::visit(Name{}, cmd);
}

}  // namespace arachne

namespace arachne::controller {

namespace {

bool is_avoiding(Mode m) { return m == Mode::AvoidLeft || m == Mode::AvoidRight || m == Mode::AvoidBackward; }

Mode avoid_mode(Avoidance a)
{
  switch (a) {
    case Avoidance::Left: return Mode::AvoidLeft;
    case Avoidance::Right: return Mode::AvoidRight;
    case Avoidance::Backward: return Mode::AvoidBackward;
  }
  return Mode::AvoidLeft;
}

void forget(ControllerState& s)
{
  if (s.memory > 0 && --s.memory == 0) {
    s.last_divert = Mode::Idle;
  }
}

StepResult walk(ControllerState s, const sensors::SensorFrame& frame, const sensors::Clearances& clearances,
                const arena::RobotPose& pose, const ControllerParams& params)
{
  if (frame.ultrasonic.triggered) {
    Avoidance a = choose_avoidance(frame, clearances, params);
    if (s.memory > 0) {
      // Same obstacle as last time: keep going round it the same way instead of dithering.
      a = s.last_divert == Mode::AvoidRight ? Avoidance::Right : Avoidance::Left;
      if (s.last_divert == Mode::AvoidBackward) {
        a = clearances.right > clearances.left + params.tie_margin ? Avoidance::Right : Avoidance::Left;
      }
    }
    // Backing into something is worse than turning on the spot.
    if (a == Avoidance::Backward && clearances.rear < params.backward_clearance) {
      a = Avoidance::Left;
    }
    s.mode = avoid_mode(a);
    s.countdown = params.avoid_phases;
    s.hold = 0;
    return {s, motion_for(s.mode)};
  }
  if (s.hold > 0) {
    --s.hold;
    forget(s);
    return {s, MotionCommand::Forward};
  }
  const Eigen::Vector2d to_goal = s.task->goal - pose.position();
  const double error = normalize_angle(std::atan2(to_goal.y(), to_goal.x()) - pose.heading);
  if (std::abs(error) > params.heading_threshold) {
    return {s, error > 0.0 ? MotionCommand::Left : MotionCommand::Right};
  }
  forget(s);
  return {s, MotionCommand::Forward};
}

}  // namespace

const char* to_string(Mode m)
{
  switch (m) {
    case Mode::Idle: return "idle";
    case Mode::WalkForward: return "walk_forward";
    case Mode::AvoidLeft: return "avoid_left";
    case Mode::AvoidRight: return "avoid_right";
    case Mode::AvoidBackward: return "avoid_backward";
    case Mode::Reached: return "reached";
  }
  return "?";
}

const char* to_string(MotionCommand c)
{
  switch (c) {
    case MotionCommand::Forward: return "forward";
    case MotionCommand::Left: return "left";
    case MotionCommand::Right: return "right";
    case MotionCommand::Backward: return "backward";
    case MotionCommand::Halt: return "halt";
  }
  return "?";
}

std::optional<gait::Direction> to_direction(MotionCommand c)
{
  switch (c) {
    case MotionCommand::Forward: return gait::Direction::Forward;
    case MotionCommand::Left: return gait::Direction::Left;
    case MotionCommand::Right: return gait::Direction::Right;
    case MotionCommand::Backward: return gait::Direction::Backward;
    case MotionCommand::Halt: return std::nullopt;
  }
  return std::nullopt;
}

bool ControllerState::valid() const
{
  if ((countdown > 0) != is_avoiding(mode) || countdown < 0 || hold < 0) {
    return false;
  }
  if (hold > 0 && mode != Mode::WalkForward) {
    return false;
  }
  if (memory < 0 || (memory > 0) != (last_divert != Mode::Idle) ||
      (last_divert != Mode::Idle && !is_avoiding(last_divert))) {
    return false;
  }
  return (mode == Mode::Idle) != task.has_value();
}

void ControllerParams::validate() const
{
  if (avoid_phases < 1) {
    throw std::invalid_argument("avoid_phases must be at least 1");
  }
  if (resume_phases < 0 || divert_memory < 0) {
    throw std::invalid_argument("resume_phases and divert_memory must be non-negative");
  }
  if (!(tie_margin >= 0.0) || !(min_side_clearance >= 0.0) || !(backward_clearance >= 0.0)) {
    throw std::invalid_argument("controller distances must be non-negative");
  }
  if (!(heading_threshold > 0.0 && heading_threshold < kPi)) {
    throw std::invalid_argument("heading_threshold must lie in (0, 180) degrees");
  }
}

Avoidance choose_avoidance(const sensors::SensorFrame&, const sensors::Clearances& c, const ControllerParams& p)
{
  if (c.left > c.right + p.tie_margin) {
    return Avoidance::Left;
  }
  if (c.right > c.left + p.tie_margin) {
    return Avoidance::Right;
  }
  if (c.left < p.min_side_clearance && c.right < p.min_side_clearance) {
    return Avoidance::Backward;
  }
  return Avoidance::Left;
}

MotionCommand motion_for(Mode mode)
{
  switch (mode) {
    case Mode::WalkForward: return MotionCommand::Forward;
    case Mode::AvoidLeft: return MotionCommand::Left;
    case Mode::AvoidRight: return MotionCommand::Right;
    case Mode::AvoidBackward: return MotionCommand::Backward;
    case Mode::Idle:
    case Mode::Reached: return MotionCommand::Halt;
  }
  return MotionCommand::Halt;
}

bool at_goal(const ControllerState& state, const arena::RobotPose& pose)
{
  return state.task && (pose.position() - state.task->goal).norm() <= state.task->radius;
}

StepResult step(const ControllerState& state, const sensors::SensorFrame& frame, const sensors::Clearances& clearances,
                const arena::RobotPose& pose, const ControllerParams& params)
{
  ControllerState s = state;
  if (s.mode == Mode::Idle || s.mode == Mode::Reached) {
    return {s, MotionCommand::Halt};
  }
  if (at_goal(s, pose)) {
    s.mode = Mode::Reached;
    s.countdown = 0;
    s.hold = 0;
    s.last_divert = Mode::Idle;
    s.memory = 0;
    return {s, MotionCommand::Halt};
  }
  if (is_avoiding(s.mode)) {
    // countdown includes the phase commanded on entry
    if (--s.countdown > 0) {
      return {s, motion_for(s.mode)};
    }
    s.last_divert = params.divert_memory > 0 ? s.mode : Mode::Idle;
    s.memory = params.divert_memory;
    s.mode = Mode::WalkForward;
    s.hold = params.resume_phases;
  }
  return walk(s, frame, clearances, pose, params);
}

ControllerState handle_command(const ControllerState& state, const Command& cmd)
{
  if (const auto* t = std::get_if<SetTask>(&cmd)) {
    if (!std::isfinite(t->x) || !std::isfinite(t->y) || !std::isfinite(t->radius)) {
      throw RejectedCommand("set_task coordinates must be finite");
    }
    if (!(t->radius > 0.0)) {
      throw RejectedCommand("set_task arrival radius must be positive");
    }
    ControllerState s;
    s.mode = Mode::WalkForward;
    s.task = Task{{t->x, t->y}, t->radius};
    return s;
  }
  if (std::holds_alternative<Stop>(cmd)) {
    return ControllerState{};
  }
  return state;
}

}  // namespace arachne::controller
