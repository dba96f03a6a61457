#pragma once

#include <numbers>

namespace arachne {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-pi, pi].
double normalize_angle(double rad);

}  // namespace arachne
