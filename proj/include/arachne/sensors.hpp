#pragma once

#include <cstdint>
#include <random>

#include "arachne/arena.hpp"

namespace arachne::sensors {

/// Seeded random source owned by one consumer. Substreams derived from (seed, stream, index)
/// are independent of evaluation order, which keeps parallel trials reproducible.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct UltrasonicConfig {
  double trigger_distance = 0.30;      ///< meters from the body front
  double max_range = 2.0;
  double noise_sigma = 0.003;
  double detection_probability = 0.97;
  /// Beam as wide as the body (swept-disc cast); false uses a single thin ray from the center.
  bool body_width_beam = true;

  void validate() const;
};

struct SmokeConfig {
  double threshold = 0.5;  ///< concentration units of the arena smoke field
  double detection_probability = 1.0;

  void validate() const;
};

struct TemperatureConfig {
  double relative_error_bound = 0.05;
  double relative_sigma = 0.02;  ///< std-dev of the multiplicative error before truncation

  void validate() const;
};

struct SensorSuite {
  UltrasonicConfig ultrasonic;
  SmokeConfig smoke;
  TemperatureConfig temperature;

  void validate() const;
  static SensorSuite noiseless();
};

struct UltrasonicReading {
  double distance = 0.0;
  bool triggered = false;
  bool dropout = false;
};

struct SensorFrame {
  double timestamp = 0.0;
  UltrasonicReading ultrasonic;
  bool smoke = false;
  double temperature = 0.0;  ///< degrees Celsius
};

/// Free distance ahead of the body front, clamped to [0, max_range].
double ultrasonic_truth(const arena::WorldState& world, const arena::RobotPose& pose, const UltrasonicConfig& cfg);

UltrasonicReading ultrasonic_read(const arena::WorldState& world, const arena::RobotPose& pose,
                                  const UltrasonicConfig& cfg, RandomStream& rng);
bool smoke_read(const arena::WorldState& world, const arena::RobotPose& pose, const SmokeConfig& cfg,
                RandomStream& rng);
double temperature_read(const arena::WorldState& world, const arena::RobotPose& pose, const TemperatureConfig& cfg,
                        RandomStream& rng);

/// Reads ultrasonic, smoke and temperature in that order.
SensorFrame read_frame(const arena::WorldState& world, const arena::RobotPose& pose, const SensorSuite& suite,
                       RandomStream& rng);

/// Noise-free distances from the body edge along the auxiliary side rays (+-90 deg) and the
/// free travel of the body straight back. Used only by the avoidance policy.
struct Clearances {
  double left = 0.0;
  double right = 0.0;
  double rear = 0.0;
};

Clearances side_clearances(const arena::WorldState& world, const arena::RobotPose& pose, double max_range);

}  // namespace arachne::sensors
