#include "arachne/angles.hpp"

#include <cmath>

namespace arachne {

double normalize_angle(double rad)
{
  double wrapped = std::remainder(rad, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) {
    wrapped += 2.0 * kPi;
  }
  return wrapped;
}

}  // namespace arachne
