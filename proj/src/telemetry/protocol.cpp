#include "arachne/telemetry/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "../arena_json.hpp"
#include "../json_fields.hpp"
#include "protocol_json.hpp"

namespace arachne::telemetry {

using detail::json;

namespace {

std::string quote(const std::string& s)
{
  return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string vec(double x, double y) { return "[" + format_number(x) + "," + format_number(y) + "]"; }

std::string shape_json(const arena::Obstacle& ob)
{
  if (const auto* r = std::get_if<arena::Rect>(&ob)) {
    return R"({"type":"rect","min":)" + vec(r->min.x(), r->min.y()) + R"(,"max":)" + vec(r->max.x(), r->max.y()) +
           "}";
  }
  const auto& c = std::get<arena::Circle>(ob);
  return R"({"type":"circle","center":)" + vec(c.center.x(), c.center.y()) +
         R"(,"radius":)" + format_number(c.radius) + "}";
}

struct DataWriter {
  std::string operator()(const Temperature& t) const { return R"({"celsius":)" + format_number(t.celsius) + "}"; }
  std::string operator()(const Smoke& s) const
  {
    return std::string(R"({"detected":)") + (s.detected ? "true" : "false") + "}";
  }
  std::string operator()(const DirectionChange& d) const
  {
    return R"({"direction":")" + std::string(controller::to_string(d.direction)) + "\"}";
  }
  std::string operator()(const Pose& p) const
  {
    return R"({"x":)" + format_number(p.x) + R"(,"y":)" + format_number(p.y) + R"(,"heading_deg":)" +
           format_number(p.heading_deg) + "}";
  }
  std::string operator()(const Joints& j) const
  {
    std::string out = R"({"degrees":[)";
    for (std::size_t i = 0; i < j.degrees.size(); ++i) {
      out += (i ? "," : "") + format_number(j.degrees[i]);
    }
    return out + "]}";
  }
  std::string operator()(const Event& e) const
  {
    return R"({"event":")" + std::string(to_string(e.event)) + R"(","detail":)" + quote(e.detail) + "}";
  }
};

// --- decoding ---

void expect_keys(const json& obj, const std::set<std::string>& required, const std::set<std::string>& optional,
                 const std::string& where)
{
  for (const auto& key : required) {
    if (!obj.contains(key)) {
      throw SchemaError(where + ": missing field '" + key + "'");
    }
  }
  for (const auto& [key, value] : obj.items()) {
    if (!required.count(key) && !optional.count(key)) {
      throw SchemaError(where + ": unexpected field '" + key + "'");
    }
  }
}

const json& object_at(const json& obj, const char* key, const std::string& where)
{
  const json& v = obj.at(key);
  if (!v.is_object()) {
    throw SchemaError(where + "." + key + ": expected an object");
  }
  return v;
}

double num(const json& obj, const char* key, const std::string& where)
{
  const json& v = obj.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    throw SchemaError(where + "." + key + ": expected a finite number");
  }
  return v.get<double>();
}

int positive_int(const json& obj, const char* key, const std::string& where)
{
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1000000) {
    throw SchemaError(where + "." + key + ": expected a positive integer");
  }
  return static_cast<int>(v.get<long long>());
}

json parse_line(std::string_view line)
{
  if (!line.empty() && line.back() == '\n') {
    line.remove_suffix(1);
  }
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  if (line.find('\n') != std::string_view::npos) {
    throw FrameError("embedded newline in frame");
  }
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw FrameError(std::string("invalid JSON: ") + e.what());
  }
}

const std::set<std::string> kCommandTypes{"set_task", "place_obstacle", "stop", "set_rate"};
const std::set<std::string> kMessageTypes{"temperature", "smoke", "direction", "pose", "joints", "event"};

std::string type_of(const json& j)
{
  if (!j.is_object()) {
    throw SchemaError("expected a JSON object");
  }
  const auto it = j.find("type");
  if (it == j.end() || !it->is_string()) {
    throw SchemaError("missing string field 'type'");
  }
  const std::string type = it->get<std::string>();
  if (!kCommandTypes.count(type) && !kMessageTypes.count(type)) {
    throw SchemaError("unknown type '" + type + "'");
  }
  return type;
}

controller::MotionCommand motion_from(const std::string& s)
{
  using controller::MotionCommand;
  for (MotionCommand c : {MotionCommand::Forward, MotionCommand::Left, MotionCommand::Right, MotionCommand::Backward,
                          MotionCommand::Halt}) {
    if (s == controller::to_string(c)) {
      return c;
    }
  }
  throw SchemaError("data.direction: unknown direction '" + s + "'");
}

EventKind event_from(const std::string& s)
{
  for (EventKind k : {EventKind::Collision, EventKind::Reached, EventKind::TaskAccepted, EventKind::TaskRejected,
                      EventKind::ProtocolError}) {
    if (s == to_string(k)) {
      return k;
    }
  }
  throw SchemaError("data.event: unknown event '" + s + "'");
}

TelemetryMessage message_from_json(const json& j, const std::string& type)
{
  expect_keys(j, {"type", "seq", "t_sim", "data"}, {}, type);
  TelemetryMessage m;
  const json& seq = j.at("seq");
  if (!seq.is_number_unsigned()) {
    throw SchemaError(type + ".seq: expected a non-negative integer");
  }
  m.seq = seq.get<std::uint64_t>();
  m.t_sim = num(j, "t_sim", type);
  const json& d = object_at(j, "data", type);
  const std::string where = type + ".data";
  if (type == "temperature") {
    expect_keys(d, {"celsius"}, {}, where);
    m.data = Temperature{num(d, "celsius", where)};
  } else if (type == "smoke") {
    expect_keys(d, {"detected"}, {}, where);
    if (!d.at("detected").is_boolean()) {
      throw SchemaError(where + ".detected: expected a boolean");
    }
    m.data = Smoke{d.at("detected").get<bool>()};
  } else if (type == "direction") {
    expect_keys(d, {"direction"}, {}, where);
    if (!d.at("direction").is_string()) {
      throw SchemaError(where + ".direction: expected a string");
    }
    m.data = DirectionChange{motion_from(d.at("direction").get<std::string>())};
  } else if (type == "pose") {
    expect_keys(d, {"x", "y", "heading_deg"}, {}, where);
    m.data = Pose{num(d, "x", where), num(d, "y", where), num(d, "heading_deg", where)};
  } else if (type == "joints") {
    expect_keys(d, {"degrees"}, {}, where);
    const json& a = d.at("degrees");
    if (!a.is_array() || a.size() != 12) {
      throw SchemaError(where + ".degrees: expected 12 numbers");
    }
    Joints js;
    for (std::size_t i = 0; i < 12; ++i) {
      if (!a[i].is_number() || !std::isfinite(a[i].get<double>())) {
        throw SchemaError(where + ".degrees: expected 12 numbers");
      }
      js.degrees[i] = a[i].get<double>();
    }
    m.data = js;
  } else {
    expect_keys(d, {"event", "detail"}, {}, where);
    if (!d.at("event").is_string() || !d.at("detail").is_string()) {
      throw SchemaError(where + ": event and detail must be strings");
    }
    m.data = Event{event_from(d.at("event").get<std::string>()), d.at("detail").get<std::string>()};
  }
  return m;
}

}  // namespace

std::string format_number(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  std::string s(buf);
  if (s.find_first_of(".eni") == std::string::npos) {
    s += ".0";
  }
  return s;
}

double quantize(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

const char* type_name(const Payload& p)
{
  static constexpr const char* names[] = {"temperature", "smoke", "direction", "pose", "joints", "event"};
  return names[p.index()];
}

const char* to_string(EventKind kind)
{
  switch (kind) {
    case EventKind::Collision: return "collision";
    case EventKind::Reached: return "reached";
    case EventKind::TaskAccepted: return "task_accepted";
    case EventKind::TaskRejected: return "task_rejected";
    case EventKind::ProtocolError: return "protocol_error";
  }
  return "?";
}

std::string encode(const TelemetryMessage& msg)
{
  std::string out = R"({"type":")";
  out += type_name(msg.data);
  out += R"(","seq":)" + std::to_string(msg.seq);
  out += R"(,"t_sim":)" + format_number(msg.t_sim);
  out += R"(,"data":)" + std::visit(DataWriter{}, msg.data);
  out += "}\n";
  return out;
}

std::string encode(const Command& cmd)
{
  struct Writer {
    std::string operator()(const SetTask& t) const
    {
      return R"(,"data":{"x":)" + format_number(t.x) + R"(,"y":)" + format_number(t.y) + R"(,"radius":)" +
             format_number(t.radius) + "}";
    }
    std::string operator()(const PlaceObstacle& p) const { return R"(,"data":{"shape":)" + shape_json(p.shape) + "}"; }
    std::string operator()(const Stop&) const { return ""; }
    std::string operator()(const SetRate& r) const
    {
      std::string body;
      auto add = [&](const char* key, const std::string& value) {
        body += (body.empty() ? "" : ",") + std::string("\"") + key + "\":" + value;
      };
      if (r.temperature_period) add("temperature_period", format_number(*r.temperature_period));
      if (r.smoke_heartbeat) add("smoke_heartbeat", format_number(*r.smoke_heartbeat));
      if (r.pose_decimation) add("pose_decimation", std::to_string(*r.pose_decimation));
      if (r.joints_decimation) add("joints_decimation", std::to_string(*r.joints_decimation));
      return R"(,"data":{)" + body + "}";
    }
  };
  return R"({"type":")" + std::string(command_name(cmd)) + "\"" + std::visit(Writer{}, cmd) + "}\n";
}

Command command_from_json(const json& j)
{
  const std::string type = type_of(j);
  if (!kCommandTypes.count(type)) {
    throw SchemaError("'" + type + "' is not a command");
  }
  if (type == "stop") {
    expect_keys(j, {"type"}, {"data"}, type);
    if (j.contains("data") && !(j.at("data").is_object() && j.at("data").empty())) {
      throw SchemaError("stop.data: expected an empty object");
    }
    return Stop{};
  }
  expect_keys(j, {"type", "data"}, {}, type);
  const json& d = object_at(j, "data", type);
  const std::string where = type + ".data";
  if (type == "set_task") {
    expect_keys(d, {"x", "y", "radius"}, {}, where);
    return SetTask{num(d, "x", where), num(d, "y", where), num(d, "radius", where)};
  }
  if (type == "place_obstacle") {
    expect_keys(d, {"shape"}, {}, where);
    try {
      return PlaceObstacle{arena::parse_obstacle_at(d.at("shape"), where + ".shape")};
    } catch (const detail::FieldError& e) {
      throw SchemaError(e.what());
    }
  }
  expect_keys(d, {}, {"temperature_period", "smoke_heartbeat", "pose_decimation", "joints_decimation"}, where);
  SetRate r;
  if (d.contains("temperature_period")) r.temperature_period = num(d, "temperature_period", where);
  if (d.contains("smoke_heartbeat")) r.smoke_heartbeat = num(d, "smoke_heartbeat", where);
  if (d.contains("pose_decimation")) r.pose_decimation = positive_int(d, "pose_decimation", where);
  if (d.contains("joints_decimation")) r.joints_decimation = positive_int(d, "joints_decimation", where);
  return r;
}

Decoded decode(std::string_view line)
{
  const json j = parse_line(line);
  const std::string type = type_of(j);
  if (kCommandTypes.count(type)) {
    return command_from_json(j);
  }
  return message_from_json(j, type);
}

Command decode_command(std::string_view line)
{
  Decoded d = decode(line);
  if (auto* c = std::get_if<Command>(&d)) {
    return std::move(*c);
  }
  throw SchemaError("expected a command, got a telemetry message");
}

TelemetryMessage decode_message(std::string_view line)
{
  Decoded d = decode(line);
  if (auto* m = std::get_if<TelemetryMessage>(&d)) {
    return std::move(*m);
  }
  throw SchemaError("expected a telemetry message, got a command");
}

}  // namespace arachne::telemetry
