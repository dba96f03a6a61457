#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arachne/arena.hpp"
#include "arachne/config.hpp"
#include "arachne/controller.hpp"
#include "arachne/gait.hpp"
#include "arachne/sensors.hpp"
#include "arachne/telemetry/protocol.hpp"
#include "arachne/telemetry/scheduler.hpp"

namespace arachne::sim {

struct TickRecord {
  std::uint64_t tick = 0;
  double t_sim = 0.0;
  arena::RobotPose pose;
  controller::Mode mode = controller::Mode::Idle;
  controller::MotionCommand command = controller::MotionCommand::Halt;
  sensors::SensorFrame frame;  ///< read at `pose` after the move
  gait::LegJoints joints{};
  bool collision = false;
  std::vector<telemetry::Event> events;
};

enum class Outcome { Reached, Idle, TickBudgetExceeded };
const char* to_string(Outcome o);

struct RunSummary {
  std::uint64_t ticks = 0;
  std::uint64_t collisions = 0;  ///< separate contact episodes
  bool reached = false;
  Outcome outcome = Outcome::Idle;
  double distance = 0.0;          ///< path length of the body center, meters
  std::uint64_t phases = 0;       ///< gait phases executed
  std::uint64_t avoid_intervals = 0;
  arena::RobotPose final_pose;
  std::optional<double> reached_at;  ///< t_sim of arrival

  double cycles() const { return static_cast<double>(phases) / 4.0; }
};

struct RunTrace {
  std::vector<TickRecord> records;
  RunSummary summary;
};

/// One robot in one arena, advanced a tick at a time. The simulation loop is the only writer.
class Simulation {
public:
  Simulation(const SimConfig& config, arena::WorldState world);

  /// Applies `commands` in order, then runs one tick.
  const TickRecord& tick(const std::vector<Command>& commands = {});

  /// No phase in progress and nothing left to do until a new command arrives.
  bool settled() const;

  const arena::WorldState& world() const { return world_; }
  const arena::RobotPose& pose() const { return pose_; }
  const controller::ControllerState& controller_state() const { return state_; }
  const TickRecord& last() const { return last_; }
  const RunSummary& summary() const { return summary_; }
  const SimConfig& config() const { return config_; }
  telemetry::TickSnapshot snapshot() const;

private:
  void apply(const Command& cmd);
  void start_phase_if_idle();

  SimConfig config_;
  arena::WorldState world_;
  std::map<gait::Direction, gait::GaitPlan> plans_;
  sensors::RandomStream rng_;
  int ticks_per_phase_;

  arena::RobotPose pose_;
  controller::ControllerState state_;
  sensors::SensorFrame frame_;
  gait::LegJoints joints_{};

  // Phase in progress
  std::optional<gait::Direction> moving_;
  controller::MotionCommand command_ = controller::MotionCommand::Halt;
  arena::RobotPose phase_start_;
  int phase_tick_ = 0;
  std::uint64_t phase_counter_ = 0;

  bool in_contact_ = false;
  std::vector<telemetry::Event> pending_events_;
  TickRecord last_;
  RunSummary summary_;
};

/// Runs until the task is reached, the script is exhausted with the robot at rest, or the tick
/// budget runs out. `keep_records` = false keeps only the summary.
RunTrace run_sim(const SimConfig& config, const arena::WorldState& world, const CommandScript& script,
                 bool keep_records = true);
/// Loads the arena and the optional script named in the config.
RunTrace run_sim(const SimConfig& config);

/// One JSON object per tick, then one {"summary": ...} line.
void write_trace(const RunTrace& trace, std::ostream& os);
std::string summary_json(const RunSummary& s);

}  // namespace arachne::sim
