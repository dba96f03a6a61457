#include "arachne/arena.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "arachne/angles.hpp"
#include "arena_json.hpp"
#include "json_fields.hpp"

namespace arachne::arena {

using detail::FieldError;
using detail::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Vector2d unit(double heading) { return {std::cos(heading), std::sin(heading)}; }

// Entry distance of a ray into an axis-aligned box; 0 if the origin is inside, inf on a miss.
double ray_box(const Eigen::Vector2d& o, const Eigen::Vector2d& d, const Eigen::Vector2d& lo,
               const Eigen::Vector2d& hi)
{
  double t_enter = -kInf;
  double t_exit = kInf;
  for (int a = 0; a < 2; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] > hi[a]) {
        return kInf;
      }
      continue;
    }
    double t0 = (lo[a] - o[a]) / d[a];
    double t1 = (hi[a] - o[a]) / d[a];
    if (t0 > t1) {
      std::swap(t0, t1);
    }
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit || t_exit < 0.0) {
    return kInf;
  }
  return std::max(t_enter, 0.0);
}

double ray_circle(const Eigen::Vector2d& o, const Eigen::Vector2d& d, const Eigen::Vector2d& c, double r)
{
  const Eigen::Vector2d oc = o - c;
  const double cc = oc.squaredNorm() - r * r;
  if (cc <= 0.0) {
    return 0.0;
  }
  const double b = oc.dot(d);
  const double disc = b * b - cc;
  if (disc < 0.0 || b > 0.0) {
    return kInf;
  }
  return std::max(-b - std::sqrt(disc), 0.0);
}

// Exit distance from inside the boundary box shrunk by `margin`.
double ray_bounds(const Rect& b, const Eigen::Vector2d& o, const Eigen::Vector2d& d, double margin)
{
  double t = kInf;
  for (int a = 0; a < 2; ++a) {
    const double lo = b.min[a] + margin;
    const double hi = b.max[a] - margin;
    if (o[a] < lo || o[a] > hi) {
      return 0.0;
    }
    if (d[a] > 0.0) {
      t = std::min(t, (hi - o[a]) / d[a]);
    } else if (d[a] < 0.0) {
      t = std::min(t, (lo - o[a]) / d[a]);
    }
  }
  return t;
}

double rect_distance(const Rect& r, const Eigen::Vector2d& p)
{
  const double dx = std::max({r.min.x() - p.x(), 0.0, p.x() - r.max.x()});
  const double dy = std::max({r.min.y() - p.y(), 0.0, p.y() - r.max.y()});
  return std::hypot(dx, dy);
}

bool finite(const Eigen::Vector2d& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

GaussianSource parse_source(const json& j, const std::string& path)
{
  detail::only_keys(j, path, {"center", "amplitude", "sigma"});
  GaussianSource s;
  s.center = detail::vec2(j, "center", path);
  s.amplitude = detail::number(j, "amplitude", path);
  s.sigma = detail::number(j, "sigma", path);
  return s;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte)
{
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Obstacle parse_obstacle_at(const json& j, const std::string& path)
{
  detail::require_object(j, path);
  const std::string type = detail::string_or(j, "type", path, "");
  if (type == "rect") {
    detail::only_keys(j, path, {"type", "min", "max"});
    return Rect{detail::vec2(j, "min", path), detail::vec2(j, "max", path)};
  }
  if (type == "circle") {
    detail::only_keys(j, path, {"type", "center", "radius"});
    return Circle{detail::vec2(j, "center", path), detail::number(j, "radius", path)};
  }
  throw FieldError(detail::join(path, "type"), "expected \"rect\" or \"circle\"");
}

double GaussianSource::at(const Eigen::Vector2d& p) const
{
  return amplitude * std::exp(-(p - center).squaredNorm() / (2.0 * sigma * sigma));
}

double WorldState::smoke_at(const Eigen::Vector2d& p) const
{
  double total = 0.0;
  for (const auto& s : smoke_sources) {
    total += s.at(p);
  }
  return total;
}

double WorldState::temperature_at(const Eigen::Vector2d& p) const
{
  double total = temperature.ambient;
  for (const auto& s : temperature.hot_spots) {
    total += s.at(p);
  }
  return total;
}

double raycast(const WorldState& world, const Eigen::Vector2d& origin, double heading)
{
  const Eigen::Vector2d d = unit(heading);
  double best = ray_bounds(world.bounds, origin, d, 0.0);
  for (const auto& ob : world.obstacles) {
    if (const auto* r = std::get_if<Rect>(&ob)) {
      best = std::min(best, ray_box(origin, d, r->min, r->max));
    } else {
      const auto& c = std::get<Circle>(ob);
      best = std::min(best, ray_circle(origin, d, c.center, c.radius));
    }
  }
  return best;
}

double sweep_cast(const WorldState& world, const Eigen::Vector2d& origin, double heading, double radius)
{
  if (radius <= 0.0) {
    return raycast(world, origin, heading);
  }
  const Eigen::Vector2d d = unit(heading);
  double best = ray_bounds(world.bounds, origin, d, radius);
  const Eigen::Vector2d rx(radius, 0.0);
  const Eigen::Vector2d ry(0.0, radius);
  for (const auto& ob : world.obstacles) {
    if (const auto* r = std::get_if<Rect>(&ob)) {
      // Minkowski sum of the box and the disc: two padded boxes plus four corner discs.
      best = std::min(best, ray_box(origin, d, r->min - rx, r->max + rx));
      best = std::min(best, ray_box(origin, d, r->min - ry, r->max + ry));
      for (const Eigen::Vector2d& corner : {r->min, r->max, Eigen::Vector2d(r->min.x(), r->max.y()),
                                           Eigen::Vector2d(r->max.x(), r->min.y())}) {
        best = std::min(best, ray_circle(origin, d, corner, radius));
      }
    } else {
      const auto& c = std::get<Circle>(ob);
      best = std::min(best, ray_circle(origin, d, c.center, c.radius + radius));
    }
  }
  return best;
}

bool point_in_obstacle(const WorldState& world, const Eigen::Vector2d& p)
{
  for (const auto& ob : world.obstacles) {
    if (const auto* r = std::get_if<Rect>(&ob)) {
      if (r->contains(p)) {
        return true;
      }
    } else {
      const auto& c = std::get<Circle>(ob);
      if ((p - c.center).squaredNorm() <= c.radius * c.radius) {
        return true;
      }
    }
  }
  return false;
}

bool disc_collides(const WorldState& world, const Eigen::Vector2d& center, double radius)
{
  const Rect& b = world.bounds;
  if (center.x() - radius < b.min.x() || center.x() + radius > b.max.x() || center.y() - radius < b.min.y() ||
      center.y() + radius > b.max.y()) {
    return true;
  }
  for (const auto& ob : world.obstacles) {
    if (const auto* r = std::get_if<Rect>(&ob)) {
      if (rect_distance(*r, center) < radius) {
        return true;
      }
    } else {
      const auto& c = std::get<Circle>(ob);
      if ((center - c.center).norm() < c.radius + radius) {
        return true;
      }
    }
  }
  return false;
}

AdvanceResult advance(WorldState& world, const RobotPose& phase_start, const gait::BodyMotion* motion,
                      double progress, double dt)
{
  AdvanceResult out;
  out.pose = phase_start;
  if (motion) {
    out.pose = RobotPose::from_planar(gait::apply_motion(phase_start.planar(), gait::motion_at(*motion, progress)),
                                      phase_start.radius);
  }
  world.tick += 1;
  world.clock = static_cast<double>(world.tick) * dt;
  out.collision = disc_collides(world, out.pose.position(), out.pose.radius);
  return out;
}

RobotPose start_pose(const WorldState& world, double body_radius)
{
  return {world.robot_start.x, world.robot_start.y, normalize_angle(deg_to_rad(world.robot_start.heading_deg)),
          body_radius};
}

void validate_obstacle(const WorldState& world, const Obstacle& obstacle, const std::string& entity)
{
  const Rect& b = world.bounds;
  if (const auto* r = std::get_if<Rect>(&obstacle)) {
    if (!finite(r->min) || !finite(r->max) || !(r->min.x() < r->max.x() && r->min.y() < r->max.y())) {
      throw ValidationError(entity, "rectangle must have min < max");
    }
    if (!b.contains(r->min) || !b.contains(r->max)) {
      throw ValidationError(entity, "rectangle lies outside the arena bounds");
    }
  } else {
    const auto& c = std::get<Circle>(obstacle);
    if (!finite(c.center) || !(c.radius > 0.0) || !std::isfinite(c.radius)) {
      throw ValidationError(entity, "circle radius must be positive");
    }
    const Eigen::Vector2d extent(c.radius, c.radius);
    if (!b.contains(c.center - extent) || !b.contains(c.center + extent)) {
      throw ValidationError(entity, "circle lies outside the arena bounds");
    }
  }
}

void validate(const WorldState& world)
{
  const Rect& b = world.bounds;
  if (!finite(b.min) || !finite(b.max) || !(b.min.x() < b.max.x() && b.min.y() < b.max.y())) {
    throw ValidationError("bounds", "bounds must have min < max on both axes");
  }
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    validate_obstacle(world, world.obstacles[i], "obstacles[" + std::to_string(i) + "]");
  }
  auto check_source = [&](const GaussianSource& s, const std::string& entity, bool non_negative) {
    if (!(s.sigma > 0.0)) {
      throw ValidationError(entity, "sigma must be positive");
    }
    if (non_negative && s.amplitude < 0.0) {
      throw ValidationError(entity, "amplitude must be non-negative");
    }
    if (!b.contains(s.center)) {
      throw ValidationError(entity, "center lies outside the arena bounds");
    }
  };
  for (std::size_t i = 0; i < world.smoke_sources.size(); ++i) {
    check_source(world.smoke_sources[i], "smoke_sources[" + std::to_string(i) + "]", true);
  }
  for (std::size_t i = 0; i < world.temperature.hot_spots.size(); ++i) {
    check_source(world.temperature.hot_spots[i], "temperature.hot_spots[" + std::to_string(i) + "]", false);
  }
  if (!b.contains({world.robot_start.x, world.robot_start.y})) {
    throw ValidationError("robot_start", "start position lies outside the arena bounds");
  }
}

WorldState load_arena(const std::string& document)
{
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(document, e.byte);
    std::ostringstream os;
    os << "arena JSON parse error at line " << line << ", column " << column;
    throw ParseError(os.str(), line, column);
  }

  WorldState w;
  try {
    detail::only_keys(root, "", {"bounds", "obstacles", "smoke_sources", "temperature", "robot_start"});
    const json* bounds = detail::find(root, "bounds");
    if (!bounds) {
      throw FieldError("bounds", "missing field");
    }
    detail::only_keys(*bounds, "bounds", {"min", "max"});
    w.bounds = Rect{detail::vec2(*bounds, "min", "bounds"), detail::vec2(*bounds, "max", "bounds")};

    if (const json* obs = detail::array_or_null(root, "obstacles", "")) {
      for (std::size_t i = 0; i < obs->size(); ++i) {
        w.obstacles.push_back(parse_obstacle_at((*obs)[i], detail::join("obstacles", i)));
      }
    }
    if (const json* smoke = detail::array_or_null(root, "smoke_sources", "")) {
      for (std::size_t i = 0; i < smoke->size(); ++i) {
        w.smoke_sources.push_back(parse_source((*smoke)[i], detail::join("smoke_sources", i)));
      }
    }
    if (const json* temp = detail::find(root, "temperature")) {
      detail::only_keys(*temp, "temperature", {"ambient", "hot_spots"});
      w.temperature.ambient = detail::number_or(*temp, "ambient", "temperature", w.temperature.ambient);
      if (const json* spots = detail::array_or_null(*temp, "hot_spots", "temperature")) {
        for (std::size_t i = 0; i < spots->size(); ++i) {
          w.temperature.hot_spots.push_back(parse_source((*spots)[i], detail::join("temperature.hot_spots", i)));
        }
      }
    }
    const Eigen::Vector2d mid = 0.5 * (w.bounds.min + w.bounds.max);
    w.robot_start = {mid.x(), mid.y(), 0.0};
    if (const json* start = detail::find(root, "robot_start")) {
      detail::only_keys(*start, "robot_start", {"x", "y", "heading_deg"});
      w.robot_start.x = detail::number_or(*start, "x", "robot_start", mid.x());
      w.robot_start.y = detail::number_or(*start, "y", "robot_start", mid.y());
      w.robot_start.heading_deg = detail::number_or(*start, "heading_deg", "robot_start", 0.0);
    }
  } catch (const FieldError& e) {
    throw ValidationError(e.path(), e.message());
  }
  validate(w);
  return w;
}

WorldState load_arena_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ArenaError("cannot open arena file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_arena(ss.str());
}

std::string save_arena(const WorldState& world)
{
  using ojson = nlohmann::ordered_json;
  auto source = [](const GaussianSource& s) {
    ojson j;
    j["center"] = ojson::array({s.center.x(), s.center.y()});
    j["amplitude"] = s.amplitude;
    j["sigma"] = s.sigma;
    return j;
  };
  ojson root;
  root["bounds"] = {{"min", ojson::array({world.bounds.min.x(), world.bounds.min.y()})},
                    {"max", ojson::array({world.bounds.max.x(), world.bounds.max.y()})}};
  root["obstacles"] = ojson::array();
  for (const auto& ob : world.obstacles) {
    ojson j;
    if (const auto* r = std::get_if<Rect>(&ob)) {
      j["type"] = "rect";
      j["min"] = ojson::array({r->min.x(), r->min.y()});
      j["max"] = ojson::array({r->max.x(), r->max.y()});
    } else {
      const auto& c = std::get<Circle>(ob);
      j["type"] = "circle";
      j["center"] = ojson::array({c.center.x(), c.center.y()});
      j["radius"] = c.radius;
    }
    root["obstacles"].push_back(j);
  }
  root["smoke_sources"] = ojson::array();
  for (const auto& s : world.smoke_sources) {
    root["smoke_sources"].push_back(source(s));
  }
  root["temperature"]["ambient"] = world.temperature.ambient;
  root["temperature"]["hot_spots"] = ojson::array();
  for (const auto& s : world.temperature.hot_spots) {
    root["temperature"]["hot_spots"].push_back(source(s));
  }
  root["robot_start"] = {{"x", world.robot_start.x},
                         {"y", world.robot_start.y},
                         {"heading_deg", world.robot_start.heading_deg}};
  return root.dump(2) + "\n";
}

}  // namespace arachne::arena
