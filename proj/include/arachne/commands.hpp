#pragma once

#include <optional>
#include <variant>

#include "arachne/arena.hpp"

namespace arachne {

/// Operator commands, shared by the wire protocol, command scripts and the controller.
struct SetTask {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;  ///< arrival radius, meters
  bool operator==(const SetTask&) const = default;
};

struct PlaceObstacle {
  arena::Obstacle shape;
  bool operator==(const PlaceObstacle&) const = default;
};

struct Stop {
  bool operator==(const Stop&) const = default;
};

/// Telemetry cadence overrides; absent fields keep their current value.
struct SetRate {
  std::optional<double> temperature_period;   ///< seconds of sim time
  std::optional<double> smoke_heartbeat;      ///< seconds of sim time
  std::optional<int> pose_decimation;         ///< ticks
  std::optional<int> joints_decimation;       ///< ticks
  bool operator==(const SetRate&) const = default;
};

using Command = std::variant<SetTask, PlaceObstacle, Stop, SetRate>;

const char* command_name(const Command& cmd);

}  // namespace arachne
