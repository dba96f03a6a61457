#include "arachne/servo.hpp"

#include <cmath>
#include <sstream>

namespace arachne::gait {

void ServoConfig::validate() const
{
  if (!(pulse_min_us < pulse_max_us)) {
    throw std::invalid_argument("servo pulse_min must be below pulse_max");
  }
  if (!(period_ms * 1000.0 > pulse_max_us)) {
    throw std::invalid_argument("servo period must exceed the longest pulse");
  }
  for (double off : mount_offset) {
    if (!std::isfinite(off)) {
      throw std::invalid_argument("servo mount offsets must be finite");
    }
  }
  if (!(angle_range > 0.0) || !std::isfinite(angle_min)) {
    throw std::invalid_argument("servo angle range must be positive");
  }
}

int angle_to_pulse(double q, const ServoConfig& sc)
{
  const double u = (q - sc.angle_min) / sc.angle_range;
  if (!(u >= 0.0 && u <= 1.0)) {
    std::ostringstream os;
    os << "servo angle " << q << " rad outside [" << sc.angle_min << ", " << sc.angle_min + sc.angle_range
       << "]";
    throw ServoRangeError(os.str());
  }
  return static_cast<int>(std::lround(sc.pulse_min_us + u * (sc.pulse_max_us - sc.pulse_min_us)));
}

std::array<int, 12> servo_frame(const LegJoints& joints, const ServoConfig& sc)
{
  std::array<int, 12> out{};
  for (std::size_t leg = 0; leg < 4; ++leg) {
    for (std::size_t j = 0; j < 3; ++j) {
      out[leg * 3 + j] = angle_to_pulse(joints[leg][j] - sc.mount_offset[j], sc);
    }
  }
  return out;
}

}  // namespace arachne::gait
