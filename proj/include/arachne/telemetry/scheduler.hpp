#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "arachne/arena.hpp"
#include "arachne/controller.hpp"
#include "arachne/gait.hpp"
#include "arachne/sensors.hpp"
#include "arachne/telemetry/cadence.hpp"
#include "arachne/telemetry/protocol.hpp"

namespace arachne::telemetry {

/// Immutable view of one finished simulation tick, handed to publishers.
struct TickSnapshot {
  std::uint64_t tick = 0;
  double t_sim = 0.0;
  controller::MotionCommand direction = controller::MotionCommand::Halt;
  sensors::SensorFrame frame;
  arena::RobotPose pose;
  gait::LegJoints joints{};
  std::vector<Event> events;
};

Pose pose_payload(const arena::RobotPose& pose);
Joints joints_payload(const gait::LegJoints& joints);

/// Decides which messages a tick produces. Periods are counted in whole ticks, so the cadence
/// is exact in simulated time. Messages come out with seq 0; each connection numbers its own.
class Scheduler {
public:
  Scheduler(const Cadence& cadence, double dt);

  /// Throws std::invalid_argument and keeps the old cadence if the result would be invalid.
  void apply(const SetRate& rate);
  const Cadence& cadence() const { return cadence_; }

  /// Events first, then direction, smoke, temperature, pose, joints.
  std::vector<TelemetryMessage> on_tick(const TickSnapshot& snap);

private:
  void recompute();

  Cadence cadence_;
  double dt_;
  std::uint64_t temperature_ticks_ = 1;
  std::uint64_t heartbeat_ticks_ = 1;
  std::uint64_t last_temperature_ = 0;
  std::uint64_t last_smoke_tick_ = 0;
  std::optional<bool> last_smoke_;
  std::optional<controller::MotionCommand> last_direction_;
};

}  // namespace arachne::telemetry
