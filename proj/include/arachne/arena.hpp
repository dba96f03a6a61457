#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "arachne/gait.hpp"

namespace arachne::arena {

struct Rect {
  Eigen::Vector2d min = Eigen::Vector2d::Zero();
  Eigen::Vector2d max = Eigen::Vector2d::Zero();

  bool contains(const Eigen::Vector2d& p) const
  {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
  }
  bool operator==(const Rect& o) const { return min == o.min && max == o.max; }
};

struct Circle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
  bool operator==(const Circle& o) const { return center == o.center && radius == o.radius; }
};

using Obstacle = std::variant<Rect, Circle>;

/// amplitude * exp(-|p - center|^2 / (2 sigma^2))
struct GaussianSource {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double amplitude = 0.0;
  double sigma = 1.0;

  double at(const Eigen::Vector2d& p) const;
};

struct TemperatureField {
  double ambient = 25.0;  ///< degrees Celsius
  std::vector<GaussianSource> hot_spots;
};

/// Start pose as written in arena files (heading kept in degrees to round-trip exactly).
struct RobotStart {
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 0.0;
};

struct RobotPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  ///< radians in (-pi, pi]
  double radius = 0.12;

  Eigen::Vector2d position() const { return {x, y}; }
  Eigen::Vector3d planar() const { return {x, y, heading}; }
  static RobotPose from_planar(const Eigen::Vector3d& p, double radius) { return {p.x(), p.y(), p.z(), radius}; }
};

struct WorldState {
  Rect bounds;
  std::vector<Obstacle> obstacles;
  std::vector<GaussianSource> smoke_sources;
  TemperatureField temperature;
  RobotStart robot_start;
  double clock = 0.0;
  std::uint64_t tick = 0;

  double smoke_at(const Eigen::Vector2d& p) const;
  double temperature_at(const Eigen::Vector2d& p) const;
};

struct SimulationTick {
  double dt = 0.02;
  std::uint64_t index = 0;
};

class ArenaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed JSON; carries the 1-based line and column of the failure.
class ParseError : public ArenaError {
public:
  ParseError(const std::string& what, int line, int column) : ArenaError(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Well-formed JSON that breaks an arena rule; `entity` names the offending item, e.g. "obstacles[2]".
class ValidationError : public ArenaError {
public:
  ValidationError(const std::string& entity, const std::string& what)
    : ArenaError(entity + ": " + what), entity_(entity)
  {
  }
  const std::string& entity() const { return entity_; }

private:
  std::string entity_;
};

/// Distance along a thin ray from `origin` (inside bounds) to the nearest obstacle or boundary.
double raycast(const WorldState& world, const Eigen::Vector2d& origin, double heading);

/// Distance a disc of `radius` centered at `origin` can travel along `heading` before touching an
/// obstacle or the boundary. Zero when it already overlaps one.
double sweep_cast(const WorldState& world, const Eigen::Vector2d& origin, double heading, double radius);

bool point_in_obstacle(const WorldState& world, const Eigen::Vector2d& p);
bool disc_collides(const WorldState& world, const Eigen::Vector2d& center, double radius);

struct AdvanceResult {
  RobotPose pose;
  bool collision = false;
};

/// Moves the body to fraction `progress` of a phase that started at `phase_start` and ticks the
/// clock by `dt`. A null motion (Halt) leaves the pose at `phase_start`.
AdvanceResult advance(WorldState& world, const RobotPose& phase_start, const gait::BodyMotion* motion,
                      double progress, double dt);

RobotPose start_pose(const WorldState& world, double body_radius);

void validate_obstacle(const WorldState& world, const Obstacle& obstacle, const std::string& entity);
void validate(const WorldState& world);

WorldState load_arena(const std::string& document);
WorldState load_arena_file(const std::string& path);
/// Canonical pretty-printed JSON with every key present.
std::string save_arena(const WorldState& world);

}  // namespace arachne::arena
