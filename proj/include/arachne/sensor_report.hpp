#pragma once

#include <cstdint>
#include <string>

#include "arachne/parallel.hpp"
#include "arachne/sensors.hpp"

namespace arachne {

struct SensorReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;

  double temperature_max_relative_error = 0.0;
  double temperature_mean_relative_error = 0.0;

  std::size_t ultrasonic_trials = 0;     ///< obstacle truly inside the trigger distance
  std::size_t ultrasonic_triggered = 0;
  double ultrasonic_detection_rate = 0.0;

  std::size_t smoke_exposures = 0;       ///< concentration at or above threshold
  std::size_t smoke_detected = 0;
  double smoke_detection_rate = 0.0;
  std::size_t smoke_clean = 0;           ///< below threshold
  std::size_t smoke_false_alarms = 0;
};

/// Runs `trials` randomized read-vs-truth comparisons per sensor. Trials must be >= 1.
SensorReport sensor_accuracy_report(const sensors::SensorSuite& suite, double body_radius, std::uint64_t seed,
                                    std::size_t trials, parallel::Exec exec = parallel::Exec::Parallel);

std::string report_json(const SensorReport& r);
std::string report_table(const SensorReport& r);

}  // namespace arachne
