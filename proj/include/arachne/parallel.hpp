#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "arachne/arena.hpp"
#include "arachne/config.hpp"
#include "arachne/kinematics.hpp"
#include "arachne/scenario.hpp"
#include "arachne/sensors.hpp"
#include "arachne/simulation.hpp"

namespace arachne::parallel {

/// Serial is the reference; Parallel must produce bit-identical results.
enum class Exec { Serial, Parallel };

std::vector<std::optional<kinematics::JointAngles>> batch_ik(const kinematics::LegGeometry& g,
                                                             const std::vector<kinematics::FootPosition>& targets,
                                                             kinematics::IkBranch branch, Exec exec);

struct Ray {
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double heading = 0.0;
};

std::vector<double> batch_raycast(const arena::WorldState& world, const std::vector<Ray>& rays, Exec exec);
std::vector<double> batch_sweep(const arena::WorldState& world, const std::vector<Ray>& rays, double radius,
                                Exec exec);

/// Outcome of one randomized read-vs-truth comparison for each sensor.
struct SensorTrial {
  double ultrasonic_truth = 0.0;
  bool ultrasonic_triggered = false;
  double smoke_truth = 0.0;
  bool smoke_detected = false;
  double temperature_truth = 0.0;
  double temperature_read = 0.0;
};

/// Trial i draws only from RandomStream::derive(seed, 1, i), so results do not depend on scheduling.
SensorTrial sensor_trial(const sensors::SensorSuite& suite, double body_radius, std::uint64_t seed,
                         std::uint64_t index);
std::vector<SensorTrial> sensor_trials(const sensors::SensorSuite& suite, double body_radius, std::uint64_t seed,
                                       std::size_t count, Exec exec);

/// One full controller run per scenario; scenario i uses seed base.seed + i.
std::vector<sim::RunSummary> batch_runs(const SimConfig& base, const std::vector<scenario::Scenario>& scenarios,
                                        Exec exec);

}  // namespace arachne::parallel
