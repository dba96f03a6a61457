#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "arachne/angles.hpp"
#include "arachne/commands.hpp"
#include "arachne/gait.hpp"
#include "arachne/sensors.hpp"

namespace arachne::controller {

enum class Mode { Idle, WalkForward, AvoidLeft, AvoidRight, AvoidBackward, Reached };

enum class MotionCommand { Forward, Left, Right, Backward, Halt };

const char* to_string(Mode m);
const char* to_string(MotionCommand c);
std::optional<gait::Direction> to_direction(MotionCommand c);

struct Task {
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double radius = 0.08;
  bool operator==(const Task&) const = default;
};

struct ControllerState {
  Mode mode = Mode::Idle;
  std::optional<Task> task;
  int countdown = 0;  ///< phases left in the current divert maneuver
  int hold = 0;       ///< forward phases left before heading correction resumes
  /// Side of the last divert; while `memory` > 0 a new trigger turns the same way again.
  Mode last_divert = Mode::Idle;
  int memory = 0;     ///< unobstructed forward phases left before the side is forgotten
  bool operator==(const ControllerState&) const = default;

  bool valid() const;
};

struct ControllerParams {
  int avoid_phases = 4;             ///< one gait cycle per divert
  double tie_margin = 0.05;         ///< meters
  double min_side_clearance = 0.30; ///< meters
  double heading_threshold = deg_to_rad(15.0);
  int resume_phases = 8;            ///< straight walking after a divert before steering to the goal
  int divert_memory = 24;           ///< forward phases a divert side is remembered
  double backward_clearance = 0.12; ///< rear room needed to back up, meters

  void validate() const;
};

enum class Avoidance { Left, Right, Backward };

Avoidance choose_avoidance(const sensors::SensorFrame& frame, const sensors::Clearances& clearances,
                           const ControllerParams& params);

struct StepResult {
  ControllerState state;
  MotionCommand command = MotionCommand::Halt;
};

/// Advances the machine by one gait phase.
StepResult step(const ControllerState& state, const sensors::SensorFrame& frame, const sensors::Clearances& clearances,
                const arena::RobotPose& pose, const ControllerParams& params);

MotionCommand motion_for(Mode mode);
bool at_goal(const ControllerState& state, const arena::RobotPose& pose);

class RejectedCommand : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// set_task and stop change the machine; other commands leave it untouched.
ControllerState handle_command(const ControllerState& state, const Command& cmd);

}  // namespace arachne::controller
