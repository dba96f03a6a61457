#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "arachne/commands.hpp"
#include "arachne/controller.hpp"

namespace arachne::telemetry {

struct Temperature {
  double celsius = 0.0;
  bool operator==(const Temperature&) const = default;
};

struct Smoke {
  bool detected = false;
  bool operator==(const Smoke&) const = default;
};

struct DirectionChange {
  controller::MotionCommand direction = controller::MotionCommand::Halt;
  bool operator==(const DirectionChange&) const = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 0.0;
  bool operator==(const Pose&) const = default;
};

struct Joints {
  std::array<double, 12> degrees{};  ///< L11, L12, L13, L21, ... L43
  bool operator==(const Joints&) const = default;
};

enum class EventKind { Collision, Reached, TaskAccepted, TaskRejected, ProtocolError };

struct Event {
  EventKind event = EventKind::Collision;
  std::string detail;
  bool operator==(const Event&) const = default;
};

using Payload = std::variant<Temperature, Smoke, DirectionChange, Pose, Joints, Event>;

struct TelemetryMessage {
  std::uint64_t seq = 0;
  double t_sim = 0.0;
  Payload data;
  bool operator==(const TelemetryMessage&) const = default;
};

const char* type_name(const Payload& p);
const char* to_string(EventKind kind);

/// Line is not JSON at all.
class FrameError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// JSON that does not match the schema: unknown type, missing field, wrong arity.
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest of %.9g, with ".0" appended to integral values so the JSON keeps its number type.
std::string format_number(double v);
/// The value format_number writes, read back; encode is lossless for quantized inputs.
double quantize(double v);

/// One JSON object terminated by a single LF. Keys in order type, seq, t_sim, data.
std::string encode(const TelemetryMessage& msg);
/// {"type": ..., "data": {...}} terminated by LF.
std::string encode(const Command& cmd);

using Decoded = std::variant<TelemetryMessage, Command>;

/// Accepts one line with or without its trailing LF (a CR before it is tolerated).
Decoded decode(std::string_view line);
Command decode_command(std::string_view line);
TelemetryMessage decode_message(std::string_view line);

}  // namespace arachne::telemetry
