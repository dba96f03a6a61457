#include "arachne/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arachne/telemetry/protocol.hpp"
#include "json_fields.hpp"
#include "telemetry/protocol_json.hpp"

namespace arachne {

using detail::FieldError;
using detail::json;

namespace {

namespace fs = std::filesystem;

// Every key must be known: a typo in an experiment file should fail loudly.
void read(const json& obj, const char* key, const std::string& path, double& out)
{
  out = detail::number_or(obj, key, path, out);
}

void read_deg(const json& obj, const char* key, const std::string& path, double& out_rad)
{
  out_rad = deg_to_rad(detail::number_or(obj, key, path, rad_to_deg(out_rad)));
}

template <typename Int>
void read_int(const json& obj, const char* key, const std::string& path, Int& out)
{
  const json* v = detail::find(obj, key);
  if (!v) {
    return;
  }
  if (!v->is_number_integer() || (std::is_unsigned_v<Int> && v->get<long long>() < 0)) {
    throw FieldError(detail::join(path, key), "expected an integer");
  }
  out = v->get<Int>();
}

std::string resolve(const std::string& base_dir, const std::string& p)
{
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base_dir) / path).lexically_normal().string();
}

void parse_leg(const json& j, kinematics::LegGeometry& leg)
{
  detail::only_keys(j, "leg", {"l1", "l2", "l3", "limits_deg"});
  read(j, "l1", "leg", leg.l1);
  read(j, "l2", "leg", leg.l2);
  read(j, "l3", "leg", leg.l3);
  if (const json* lim = detail::array_or_null(j, "limits_deg", "leg")) {
    if (lim->size() != 3) {
      throw FieldError("leg.limits_deg", "expected three [min, max] pairs");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const json& pair = (*lim)[i];
      const std::string p = detail::join("leg.limits_deg", i);
      if (!pair.is_array() || pair.size() != 2) {
        throw FieldError(p, "expected [min, max]");
      }
      leg.limits[i].min = deg_to_rad(detail::as_number(pair[0], detail::join(p, 0)));
      leg.limits[i].max = deg_to_rad(detail::as_number(pair[1], detail::join(p, 1)));
    }
  }
}

void parse_gait(const json& j, gait::GaitConfig& g)
{
  const std::string p = "gait";
  detail::only_keys(j, p,
            {"stride_length", "step_height", "phase_duration", "stance_y_offset", "body_height", "turn_angle_deg",
             "workspace_partition", "max_joint_speed", "branch"});
  read(j, "stride_length", p, g.stride_length);
  read(j, "step_height", p, g.step_height);
  read(j, "phase_duration", p, g.phase_duration);
  read(j, "stance_y_offset", p, g.stance_y_offset);
  read(j, "body_height", p, g.body_height);
  read_deg(j, "turn_angle_deg", p, g.turn_angle);
  read(j, "workspace_partition", p, g.workspace_partition);
  read(j, "max_joint_speed", p, g.max_joint_speed);
  const std::string branch = detail::string_or(j, "branch", p, g.branch == kinematics::IkBranch::KneeUp ? "knee_up"
                                                                                                     : "knee_down");
  if (branch == "knee_up") {
    g.branch = kinematics::IkBranch::KneeUp;
  } else if (branch == "knee_down") {
    g.branch = kinematics::IkBranch::KneeDown;
  } else {
    throw FieldError("gait.branch", "expected \"knee_up\" or \"knee_down\"");
  }
}

void parse_servo(const json& j, gait::ServoConfig& s)
{
  const std::string p = "servo";
  detail::only_keys(j, p, {"pulse_min_us", "pulse_max_us", "angle_min_deg", "angle_range_deg", "period_ms",
                   "mount_offset_deg"});
  read(j, "pulse_min_us", p, s.pulse_min_us);
  read(j, "pulse_max_us", p, s.pulse_max_us);
  read_deg(j, "angle_min_deg", p, s.angle_min);
  read_deg(j, "angle_range_deg", p, s.angle_range);
  read(j, "period_ms", p, s.period_ms);
  if (const json* off = detail::array_or_null(j, "mount_offset_deg", p)) {
    if (off->size() != 3) {
      throw FieldError("servo.mount_offset_deg", "expected three angles");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      s.mount_offset[i] = deg_to_rad(detail::as_number((*off)[i], detail::join("servo.mount_offset_deg", i)));
    }
  }
}

void parse_sensors(const json& j, sensors::SensorSuite& s)
{
  detail::only_keys(j, "sensors", {"ultrasonic", "smoke", "temperature"});
  if (const json* u = detail::find(j, "ultrasonic")) {
    const std::string p = "sensors.ultrasonic";
    detail::only_keys(*u, p, {"trigger_distance", "max_range", "noise_sigma", "detection_probability", "body_width_beam"});
    read(*u, "trigger_distance", p, s.ultrasonic.trigger_distance);
    read(*u, "max_range", p, s.ultrasonic.max_range);
    read(*u, "noise_sigma", p, s.ultrasonic.noise_sigma);
    read(*u, "detection_probability", p, s.ultrasonic.detection_probability);
    s.ultrasonic.body_width_beam = detail::boolean_or(*u, "body_width_beam", p, s.ultrasonic.body_width_beam);
  }
  if (const json* sm = detail::find(j, "smoke")) {
    const std::string p = "sensors.smoke";
    detail::only_keys(*sm, p, {"threshold", "detection_probability"});
    read(*sm, "threshold", p, s.smoke.threshold);
    read(*sm, "detection_probability", p, s.smoke.detection_probability);
  }
  if (const json* t = detail::find(j, "temperature")) {
    const std::string p = "sensors.temperature";
    detail::only_keys(*t, p, {"relative_error_bound", "relative_sigma"});
    read(*t, "relative_error_bound", p, s.temperature.relative_error_bound);
    read(*t, "relative_sigma", p, s.temperature.relative_sigma);
  }
}

void parse_controller(const json& j, controller::ControllerParams& c)
{
  const std::string p = "controller";
  detail::only_keys(j, p, {"avoid_phases", "tie_margin", "min_side_clearance", "heading_threshold_deg", "resume_phases",
                   "divert_memory", "backward_clearance"});
  read_int(j, "avoid_phases", p, c.avoid_phases);
  read(j, "tie_margin", p, c.tie_margin);
  read(j, "min_side_clearance", p, c.min_side_clearance);
  read_deg(j, "heading_threshold_deg", p, c.heading_threshold);
  read_int(j, "resume_phases", p, c.resume_phases);
  read_int(j, "divert_memory", p, c.divert_memory);
  read(j, "backward_clearance", p, c.backward_clearance);
}

void parse_telemetry(const json& j, telemetry::Cadence& c)
{
  const std::string p = "telemetry";
  detail::only_keys(j, p, {"temperature_period", "smoke_heartbeat", "pose_decimation", "joints_decimation", "queue_limit"});
  read(j, "temperature_period", p, c.temperature_period);
  read(j, "smoke_heartbeat", p, c.smoke_heartbeat);
  read_int(j, "pose_decimation", p, c.pose_decimation);
  read_int(j, "joints_decimation", p, c.joints_decimation);
  read_int(j, "queue_limit", p, c.queue_limit);
}

// Runs a component validator and re-labels its failure with the config section.
template <typename F>
void check(const std::string& path, F&& f)
{
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

int SimConfig::ticks_per_phase() const
{
  const double ratio = gait.phase_duration / dt;
  const double whole = std::round(ratio);
  if (!(whole >= 1.0) || std::abs(ratio - whole) > 1e-9 * whole) {
    throw ConfigError("gait.phase_duration", "must be a positive whole number of ticks (dt)");
  }
  return static_cast<int>(whole);
}

void SimConfig::validate() const
{
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("dt", "must be positive");
  }
  check("leg", [&] { model.leg.validate(); });
  check("body", [&] { model.body.validate(); });
  check("gait", [&] { gait.validate(); });
  ticks_per_phase();
  check("servo", [&] { servo.validate(); });
  check("sensors", [&] { sensors.validate(); });
  check("controller", [&] { controller.validate(); });
  check("telemetry", [&] { telemetry.validate(dt); });
  if (max_ticks == 0) {
    throw ConfigError("max_ticks", "must be positive");
  }
  if (arena_path.empty()) {
    throw ConfigError("arena", "missing arena file");
  }
  if (!fs::is_regular_file(arena_path)) {
    throw ConfigError("arena", "file not found: " + arena_path);
  }
  if (script_path && !fs::is_regular_file(*script_path)) {
    throw ConfigError("script", "file not found: " + *script_path);
  }
  if (task) {
    check("task", [&] { controller::handle_command(controller::ControllerState{}, *task); });
  }
}

SimConfig parse_config(const std::string& document, const std::string& base_dir)
{
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  SimConfig c;
  try {
    detail::only_keys(root, "",
              {"seed", "dt", "arena", "script", "task", "max_ticks", "leg", "body", "gait", "servo", "sensors",
               "controller", "telemetry"});
    const json* seed = detail::find(root, "seed");
    if (!seed) {
      throw FieldError("seed", "missing field (runs must name their seed)");
    }
    if (!seed->is_number_unsigned()) {
      throw FieldError("seed", "expected a non-negative integer");
    }
    c.seed = seed->get<std::uint64_t>();
    read(root, "dt", "", c.dt);
    read_int(root, "max_ticks", "", c.max_ticks);
    const std::string arena = detail::string_or(root, "arena", "", "");
    if (!arena.empty()) {
      c.arena_path = resolve(base_dir, arena);
    }
    const std::string script = detail::string_or(root, "script", "", "");
    if (!script.empty()) {
      c.script_path = resolve(base_dir, script);
    }
    if (const json* j = detail::find(root, "leg")) parse_leg(*j, c.model.leg);
    if (const json* j = detail::find(root, "body")) {
      detail::only_keys(*j, "body", {"hip_x", "hip_y", "radius"});
      read(*j, "hip_x", "body", c.model.body.hip_x);
      read(*j, "hip_y", "body", c.model.body.hip_y);
      read(*j, "radius", "body", c.model.body.radius);
    }
    if (const json* j = detail::find(root, "gait")) parse_gait(*j, c.gait);
    if (const json* j = detail::find(root, "servo")) parse_servo(*j, c.servo);
    if (const json* j = detail::find(root, "sensors")) parse_sensors(*j, c.sensors);
    if (const json* j = detail::find(root, "controller")) parse_controller(*j, c.controller);
    if (const json* j = detail::find(root, "telemetry")) parse_telemetry(*j, c.telemetry);
    // after gait: the radius defaults to one stride
    if (const json* t = detail::find(root, "task")) {
      detail::only_keys(*t, "task", {"x", "y", "radius"});
      c.task = SetTask{detail::number(*t, "x", "task"), detail::number(*t, "y", "task"),
                       detail::number_or(*t, "radius", "task", c.gait.stride_length)};
    }
  } catch (const FieldError& e) {
    throw ConfigError(e.path(), e.message());
  } catch (const json::exception& e) {
    throw ConfigError("<root>", e.what());
  }
  return c;
}

std::string read_text_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimConfig load_config(const std::string& path)
{
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("<file>", e.what());
  }
  const fs::path dir = fs::path(path).parent_path();
  return parse_config(text, dir.empty() ? "." : dir.string());
}

CommandScript parse_script(const std::string& document)
{
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError("script", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_array()) {
    throw ConfigError("script", "expected an array of {t_sim, command}");
  }
  CommandScript out;
  double last = 0.0;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string p = detail::join("script", i);
    try {
      detail::only_keys(root[i], p, {"t_sim", "command"});
      const double t = detail::number(root[i], "t_sim", p);
      if (t < last) {
        throw FieldError(detail::join(p, "t_sim"), "times must be non-negative and non-decreasing");
      }
      last = t;
      const json* cmd = detail::find(root[i], "command");
      if (!cmd) {
        throw FieldError(detail::join(p, "command"), "missing field");
      }
      out.push_back({t, telemetry::command_from_json(*cmd)});
    } catch (const FieldError& e) {
      throw ConfigError(e.path(), e.message());
    } catch (const telemetry::SchemaError& e) {
      throw ConfigError(detail::join(p, "command"), e.what());
    }
  }
  return out;
}

CommandScript load_script(const std::string& path)
{
  try {
    return parse_script(read_text_file(path));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("script", e.what());
  }
}

}  // namespace arachne
