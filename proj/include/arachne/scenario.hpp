#pragma once

#include <cstdint>

#include "arachne/arena.hpp"
#include "arachne/commands.hpp"

namespace arachne::scenario {

struct ScenarioParams {
  double width = 4.0;
  double height = 3.0;
  int min_obstacles = 3;
  int max_obstacles = 7;
  double body_radius = 0.12;
  double corridor_margin = 0.30;  ///< every gap exceeds body diameter + this
  double arrival_radius = 0.08;
};

struct Scenario {
  arena::WorldState world;
  SetTask task;
};

/// Exact clearance between two obstacles (0 when they touch or overlap).
double obstacle_gap(const arena::Obstacle& a, const arena::Obstacle& b);
/// Clearance between an obstacle and the inside of the bounds.
double wall_gap(const arena::Rect& bounds, const arena::Obstacle& o);
/// Distance from a point to an obstacle surface (0 inside).
double point_gap(const arena::Obstacle& o, const Eigen::Vector2d& p);

/// Start on the left edge facing +x, goal on the right edge, convex obstacles in between.
/// All pairwise and wall gaps exceed 2 * body_radius + corridor_margin.
Scenario random_scenario(std::uint64_t seed, const ScenarioParams& params = {});

}  // namespace arachne::scenario
