#include "arachne/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "arachne/angles.hpp"

namespace arachne::sensors {

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require(bool ok, const char* msg)
{
  if (!ok) {
    throw std::invalid_argument(msg);
  }
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

RandomStream RandomStream::derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
  return RandomStream(splitmix(splitmix(splitmix(seed) ^ stream) ^ index));
}

void UltrasonicConfig::validate() const
{
  require(trigger_distance > 0.0 && trigger_distance <= max_range, "ultrasonic: need 0 < trigger_distance <= max_range");
  require(std::isfinite(max_range), "ultrasonic: max_range must be finite");
  require(noise_sigma >= 0.0, "ultrasonic: noise_sigma must be >= 0");
  require(is_probability(detection_probability), "ultrasonic: detection_probability must lie in [0, 1]");
}

void SmokeConfig::validate() const
{
  require(std::isfinite(threshold), "smoke: threshold must be finite");
  require(is_probability(detection_probability), "smoke: detection_probability must lie in [0, 1]");
}

void TemperatureConfig::validate() const
{
  require(relative_error_bound > 0.0, "temperature: relative_error_bound must be > 0");
  require(relative_sigma >= 0.0, "temperature: relative_sigma must be >= 0");
}

void SensorSuite::validate() const
{
  ultrasonic.validate();
  smoke.validate();
  temperature.validate();
}

SensorSuite SensorSuite::noiseless()
{
  SensorSuite s;
  s.ultrasonic.noise_sigma = 0.0;
  s.ultrasonic.detection_probability = 1.0;
  s.smoke.detection_probability = 1.0;
  s.temperature.relative_sigma = 0.0;
  return s;
}

double ultrasonic_truth(const arena::WorldState& world, const arena::RobotPose& pose, const UltrasonicConfig& cfg)
{
  const double free = cfg.body_width_beam ? arena::sweep_cast(world, pose.position(), pose.heading, pose.radius)
                                          : arena::raycast(world, pose.position(), pose.heading) - pose.radius;
  return std::clamp(free, 0.0, cfg.max_range);
}

UltrasonicReading ultrasonic_read(const arena::WorldState& world, const arena::RobotPose& pose,
                                  const UltrasonicConfig& cfg, RandomStream& rng)
{
  // Fixed draw count per read keeps the stream aligned regardless of outcome.
  const double u = rng.uniform();
  const double n = rng.normal();

  UltrasonicReading r;
  const double truth = ultrasonic_truth(world, pose, cfg);
  if (u >= cfg.detection_probability || truth >= cfg.max_range) {
    r.distance = cfg.max_range;
    r.dropout = u >= cfg.detection_probability;
    return r;
  }
  r.distance = std::clamp(truth + cfg.noise_sigma * n, 0.0, cfg.max_range);
  r.triggered = r.distance <= cfg.trigger_distance;
  return r;
}

bool smoke_read(const arena::WorldState& world, const arena::RobotPose& pose, const SmokeConfig& cfg,
                RandomStream& rng)
{
  const double u = rng.uniform();
  return world.smoke_at(pose.position()) >= cfg.threshold && u < cfg.detection_probability;
}

double temperature_read(const arena::WorldState& world, const arena::RobotPose& pose, const TemperatureConfig& cfg,
                        RandomStream& rng)
{
  const double truth = world.temperature_at(pose.position());
  if (cfg.relative_sigma == 0.0) {
    return truth;
  }
  double eps = 0.0;
  do {
    eps = cfg.relative_sigma * rng.normal();
  } while (!(std::abs(eps) < cfg.relative_error_bound));
  return truth * (1.0 + eps);
}

SensorFrame read_frame(const arena::WorldState& world, const arena::RobotPose& pose, const SensorSuite& suite,
                       RandomStream& rng)
{
  SensorFrame f;
  f.timestamp = world.clock;
  f.ultrasonic = ultrasonic_read(world, pose, suite.ultrasonic, rng);
  f.smoke = smoke_read(world, pose, suite.smoke, rng);
  f.temperature = temperature_read(world, pose, suite.temperature, rng);
  return f;
}

Clearances side_clearances(const arena::WorldState& world, const arena::RobotPose& pose, double max_range)
{
  auto side = [&](double offset) {
    const double d = arena::raycast(world, pose.position(), normalize_angle(pose.heading + offset)) - pose.radius;
    return std::clamp(d, 0.0, max_range);
  };
  Clearances c;
  c.left = side(kPi / 2);
  c.right = side(-kPi / 2);
  c.rear = std::clamp(arena::sweep_cast(world, pose.position(), normalize_angle(pose.heading + kPi), pose.radius),
                      0.0, max_range);
  return c;
}

}  // namespace arachne::sensors
