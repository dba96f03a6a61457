#include "arachne/parallel.hpp"

#include <cmath>

namespace arachne::parallel {

namespace {

// The one loop shape every kernel shares; the body must only write out[i].
template <typename F>
void for_each_index(std::size_t n, Exec exec, F&& body)
{
  const auto count = static_cast<std::int64_t>(n);
  if (exec == Exec::Serial) {
    for (std::int64_t i = 0; i < count; ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < count; ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace

std::vector<std::optional<kinematics::JointAngles>> batch_ik(const kinematics::LegGeometry& g,
                                                             const std::vector<kinematics::FootPosition>& targets,
                                                             kinematics::IkBranch branch, Exec exec)
{
  std::vector<std::optional<kinematics::JointAngles>> out(targets.size());
  for_each_index(targets.size(), exec, [&](std::size_t i) {
    kinematics::IkErrorKind err{};
    out[i] = kinematics::try_inverse_kinematics(g, targets[i], branch, true, &err);
  });
  return out;
}

std::vector<double> batch_raycast(const arena::WorldState& world, const std::vector<Ray>& rays, Exec exec)
{
  std::vector<double> out(rays.size());
  for_each_index(rays.size(), exec,
                 [&](std::size_t i) { out[i] = arena::raycast(world, rays[i].origin, rays[i].heading); });
  return out;
}

std::vector<double> batch_sweep(const arena::WorldState& world, const std::vector<Ray>& rays, double radius,
                                Exec exec)
{
  std::vector<double> out(rays.size());
  for_each_index(rays.size(), exec, [&](std::size_t i) {
    out[i] = arena::sweep_cast(world, rays[i].origin, rays[i].heading, radius);
  });
  return out;
}

SensorTrial sensor_trial(const sensors::SensorSuite& suite, double body_radius, std::uint64_t seed,
                         std::uint64_t index)
{
  auto rng = sensors::RandomStream::derive(seed, 1, index);
  SensorTrial t;
  const auto& us = suite.ultrasonic;

  // A wall square to a randomly placed and oriented robot, at a distance that should trigger.
  arena::WorldState w;
  w.bounds = {{-5.0, -5.0}, {5.0, 5.0}};
  const arena::RobotPose pose{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-kPi, kPi), body_radius};
  const double hi = std::max(0.05, us.trigger_distance - 3.0 * us.noise_sigma);
  const double gap = rng.uniform(0.0, 1.0) * (hi - 0.05) + 0.05;
  {
    const Eigen::Vector2d ahead(std::cos(pose.heading), std::sin(pose.heading));
    const Eigen::Vector2d face = pose.position() + (body_radius + gap) * ahead;
    // An axis-aligned box in the robot frame is not axis-aligned in the world, so use a big circle
    // whose near surface sits at the face point; at radius 50 m the cap is flat to 1e-3 mm.
    w.bounds = {{-200.0, -200.0}, {200.0, 200.0}};
    w.obstacles.push_back(arena::Circle{face + 50.0 * ahead, 50.0});
  }

  // Smoke source near the robot; amplitude at or above threshold so roughly half the poses are exposed.
  w.smoke_sources.push_back({pose.position() + Eigen::Vector2d(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)),
                             suite.smoke.threshold * rng.uniform(1.0, 2.0), rng.uniform(0.2, 0.5)});
  w.temperature.ambient = rng.uniform(15.0, 40.0);
  w.temperature.hot_spots.push_back(
      {pose.position() + Eigen::Vector2d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 30.0),
       rng.uniform(0.2, 1.0)});

  t.ultrasonic_truth = sensors::ultrasonic_truth(w, pose, us);
  t.smoke_truth = w.smoke_at(pose.position());
  t.temperature_truth = w.temperature_at(pose.position());
  const sensors::SensorFrame f = sensors::read_frame(w, pose, suite, rng);
  t.ultrasonic_triggered = f.ultrasonic.triggered;
  t.smoke_detected = f.smoke;
  t.temperature_read = f.temperature;
  return t;
}

std::vector<SensorTrial> sensor_trials(const sensors::SensorSuite& suite, double body_radius, std::uint64_t seed,
                                       std::size_t count, Exec exec)
{
  std::vector<SensorTrial> out(count);
  for_each_index(count, exec, [&](std::size_t i) { out[i] = sensor_trial(suite, body_radius, seed, i); });
  return out;
}

std::vector<sim::RunSummary> batch_runs(const SimConfig& base, const std::vector<scenario::Scenario>& scenarios,
                                        Exec exec)
{
  std::vector<sim::RunSummary> out(scenarios.size());
  for_each_index(scenarios.size(), exec, [&](std::size_t i) {
    SimConfig cfg = base;
    cfg.seed = base.seed + i;
    cfg.task = scenarios[i].task;
    out[i] = sim::run_sim(cfg, scenarios[i].world, {}, false).summary;
  });
  return out;
}

}  // namespace arachne::parallel
