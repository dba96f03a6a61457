#include "arachne/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "arachne/sensors.hpp"

namespace arachne::scenario {

using arena::Circle;
using arena::Obstacle;
using arena::Rect;

namespace {

double rect_rect(const Rect& a, const Rect& b)
{
  const double dx = std::max({a.min.x() - b.max.x(), b.min.x() - a.max.x(), 0.0});
  const double dy = std::max({a.min.y() - b.max.y(), b.min.y() - a.max.y(), 0.0});
  return std::hypot(dx, dy);
}

}  // namespace

double point_gap(const Obstacle& o, const Eigen::Vector2d& p)
{
  if (const auto* r = std::get_if<Rect>(&o)) {
    return rect_rect(*r, Rect{p, p});
  }
  const auto& c = std::get<Circle>(o);
  return std::max((p - c.center).norm() - c.radius, 0.0);
}

double obstacle_gap(const Obstacle& a, const Obstacle& b)
{
  const auto* ra = std::get_if<Rect>(&a);
  const auto* rb = std::get_if<Rect>(&b);
  if (ra && rb) {
    return rect_rect(*ra, *rb);
  }
  if (!ra) {
    const auto& c = std::get<Circle>(a);
    return std::max(point_gap(b, c.center) - c.radius, 0.0);
  }
  const auto& c = std::get<Circle>(b);
  return std::max(point_gap(a, c.center) - c.radius, 0.0);
}

double wall_gap(const Rect& bounds, const Obstacle& o)
{
  Eigen::Vector2d lo;
  Eigen::Vector2d hi;
  if (const auto* r = std::get_if<Rect>(&o)) {
    lo = r->min;
    hi = r->max;
  } else {
    const auto& c = std::get<Circle>(o);
    lo = c.center.array() - c.radius;
    hi = c.center.array() + c.radius;
  }
  return std::min({lo.x() - bounds.min.x(), lo.y() - bounds.min.y(), bounds.max.x() - hi.x(),
                   bounds.max.y() - hi.y()});
}

Scenario random_scenario(std::uint64_t seed, const ScenarioParams& p)
{
  auto rng = sensors::RandomStream::derive(seed, 0x5ce7a210, 0);
  const double gap = 2.0 * p.body_radius + p.corridor_margin;
  // strictly wider than required, so float noise in the geometry never decides
  const double min_gap = gap + 1e-3;

  Scenario s;
  arena::WorldState& w = s.world;
  w.bounds = Rect{{0.0, 0.0}, {p.width, p.height}};
  const Eigen::Vector2d start(0.4, rng.uniform(0.6, p.height - 0.6));
  const Eigen::Vector2d goal(p.width - 0.4, rng.uniform(0.6, p.height - 0.6));
  w.robot_start = {start.x(), start.y(), 0.0};
  s.task = SetTask{goal.x(), goal.y(), p.arrival_radius};

  w.temperature.ambient = rng.uniform(18.0, 30.0);
  w.temperature.hot_spots.push_back({{rng.uniform(0.5, p.width - 0.5), rng.uniform(0.5, p.height - 0.5)},
                                     rng.uniform(5.0, 20.0), rng.uniform(0.3, 0.8)});
  w.smoke_sources.push_back({{rng.uniform(0.5, p.width - 0.5), rng.uniform(0.5, p.height - 0.5)},
                             rng.uniform(0.5, 1.5), rng.uniform(0.2, 0.5)});

  const int target = p.min_obstacles + static_cast<int>(rng.uniform() * (p.max_obstacles - p.min_obstacles + 1));
  for (int attempt = 0; attempt < 2000 && static_cast<int>(w.obstacles.size()) < target; ++attempt) {
    const Eigen::Vector2d c(rng.uniform(1.0, p.width - 1.0), rng.uniform(0.2, p.height - 0.2));
    Obstacle o;
    if (rng.uniform() < 0.5) {
      const Eigen::Vector2d half(rng.uniform(0.05, 0.3), rng.uniform(0.05, 0.3));
      o = Rect{c - half, c + half};
    } else {
      o = Circle{c, rng.uniform(0.05, 0.25)};
    }
    bool ok = wall_gap(w.bounds, o) >= min_gap && point_gap(o, start) >= min_gap &&
              point_gap(o, goal) >= min_gap;
    for (const Obstacle& other : w.obstacles) {
      ok = ok && obstacle_gap(o, other) >= min_gap;
    }
    if (ok) {
      w.obstacles.push_back(o);
    }
  }
  return s;
}

}  // namespace arachne::scenario
