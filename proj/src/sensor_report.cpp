#include "arachne/sensor_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "arachne/format.hpp"

namespace arachne {

SensorReport sensor_accuracy_report(const sensors::SensorSuite& suite, double body_radius, std::uint64_t seed,
                                    std::size_t trials, parallel::Exec exec)
{
  if (trials < 1) {
    throw std::invalid_argument("trials must be at least 1");
  }
  suite.validate();
  const auto results = parallel::sensor_trials(suite, body_radius, seed, trials, exec);

  SensorReport r;
  r.seed = seed;
  r.trials = trials;
  double sum = 0.0;
  // reduce in index order so the report is the same however the trials were scheduled
  for (const auto& t : results) {
    const double rel = std::abs(t.temperature_read - t.temperature_truth) / std::abs(t.temperature_truth);
    r.temperature_max_relative_error = std::max(r.temperature_max_relative_error, rel);
    sum += rel;
    if (t.ultrasonic_truth <= suite.ultrasonic.trigger_distance) {
      ++r.ultrasonic_trials;
      r.ultrasonic_triggered += t.ultrasonic_triggered ? 1 : 0;
    }
    if (t.smoke_truth >= suite.smoke.threshold) {
      ++r.smoke_exposures;
      r.smoke_detected += t.smoke_detected ? 1 : 0;
    } else {
      ++r.smoke_clean;
      r.smoke_false_alarms += t.smoke_detected ? 1 : 0;
    }
  }
  r.temperature_mean_relative_error = sum / static_cast<double>(trials);
  auto rate = [](std::size_t k, std::size_t n) { return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0; };
  r.ultrasonic_detection_rate = rate(r.ultrasonic_triggered, r.ultrasonic_trials);
  r.smoke_detection_rate = rate(r.smoke_detected, r.smoke_exposures);
  return r;
}

std::string report_json(const SensorReport& r)
{
  std::ostringstream os;
  os << "{\n"
     << "  \"seed\": " << r.seed << ",\n"
     << "  \"trials\": " << r.trials << ",\n"
     << "  \"temperature\": {\"max_relative_error\": " << format_double(r.temperature_max_relative_error)
     << ", \"mean_relative_error\": " << format_double(r.temperature_mean_relative_error) << "},\n"
     << "  \"ultrasonic\": {\"trials\": " << r.ultrasonic_trials << ", \"triggered\": " << r.ultrasonic_triggered
     << ", \"detection_rate\": " << format_double(r.ultrasonic_detection_rate) << "},\n"
     << "  \"smoke\": {\"exposures\": " << r.smoke_exposures << ", \"detected\": " << r.smoke_detected
     << ", \"detection_rate\": " << format_double(r.smoke_detection_rate) << ", \"clean\": " << r.smoke_clean
     << ", \"false_alarms\": " << r.smoke_false_alarms << "}\n"
     << "}\n";
  return os.str();
}

std::string report_table(const SensorReport& r)
{
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "sensor accuracy, %zu trials, seed %llu\n", r.trials,
                static_cast<unsigned long long>(r.seed));
  out += buf;
  out += "sensor       metric                  value\n";
  std::snprintf(buf, sizeof buf, "temperature  max relative error     %8.4f%%\n",
                100.0 * r.temperature_max_relative_error);
  out += buf;
  std::snprintf(buf, sizeof buf, "temperature  mean relative error    %8.4f%%\n",
                100.0 * r.temperature_mean_relative_error);
  out += buf;
  std::snprintf(buf, sizeof buf, "ultrasonic   detection rate         %8.4f  (%zu/%zu)\n",
                r.ultrasonic_detection_rate, r.ultrasonic_triggered, r.ultrasonic_trials);
  out += buf;
  std::snprintf(buf, sizeof buf, "smoke        detection rate         %8.4f  (%zu/%zu)\n", r.smoke_detection_rate,
                r.smoke_detected, r.smoke_exposures);
  out += buf;
  std::snprintf(buf, sizeof buf, "smoke        false alarms           %8zu  of %zu clean\n", r.smoke_false_alarms,
                r.smoke_clean);
  out += buf;
  return out;
}

}  // namespace arachne
