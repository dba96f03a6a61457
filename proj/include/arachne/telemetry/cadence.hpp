#pragma once

#include <cstddef>

namespace arachne::telemetry {

/// Publication schedule, all in simulated time.
struct Cadence {
  double temperature_period = 0.5;  ///< seconds
  double smoke_heartbeat = 0.5;     ///< seconds; smoke is also sent on every change
  int pose_decimation = 1;          ///< ticks between pose messages
  int joints_decimation = 1;        ///< ticks between joints messages
  std::size_t queue_limit = 4096;   ///< outbound messages buffered per client before it is dropped

  void validate(double dt) const;
};

}  // namespace arachne::telemetry
