#pragma once

#include <array>
#include <stdexcept>

#include "arachne/gait.hpp"

namespace arachne::gait {

/// Affine angle-to-pulse mapping of a hobby servo.
struct ServoConfig {
  double pulse_min_us = 500.0;
  double pulse_max_us = 2500.0;
  double angle_min = -1.5707963267948966;  ///< radians at pulse_min_us
  double angle_range = 3.141592653589793;  ///< radians covered by the pulse span
  double period_ms = 20.0;
  /// Joint angle at which each joint's servo (coxa, femur, tibia) sits at angle 0.
  std::array<double, 3> mount_offset{0.0, 0.0, -1.5707963267948966};

  void validate() const;
};

class ServoRangeError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Pulse width in microseconds, rounded to the nearest integer. Throws ServoRangeError.
int angle_to_pulse(double q, const ServoConfig& sc);

/// Pulses for all twelve joints in L11..L43 order, after removing each joint's mount offset.
std::array<int, 12> servo_frame(const LegJoints& joints, const ServoConfig& sc);

}  // namespace arachne::gait
