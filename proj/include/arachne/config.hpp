#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "arachne/commands.hpp"
#include "arachne/controller.hpp"
#include "arachne/gait.hpp"
#include "arachne/sensors.hpp"
#include "arachne/servo.hpp"
#include "arachne/telemetry/cadence.hpp"

namespace arachne {

/// Everything one experiment needs. Loaded from a JSON file; flags may override fields afterwards.
struct SimConfig {
  gait::RobotModel model = gait::default_model();
  gait::GaitConfig gait;
  gait::ServoConfig servo;
  sensors::SensorSuite sensors;
  controller::ControllerParams controller;
  telemetry::Cadence telemetry;
  double dt = 0.02;
  std::uint64_t seed = 0;
  std::string arena_path;                  ///< resolved against the config file's directory
  std::optional<std::string> script_path;  ///< likewise
  std::optional<SetTask> task;             ///< applied at t = 0
  std::uint64_t max_ticks = 30000;

  /// Ticks per gait phase; phase_duration must be a whole number of ticks.
  int ticks_per_phase() const;
  void validate() const;
};

/// Invalid configuration; `path` names the field, e.g. "gait.stride_length".
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(path)
  {
  }
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

/// Parses a config document. Relative paths are resolved against `base_dir`.
SimConfig parse_config(const std::string& document, const std::string& base_dir = ".");
SimConfig load_config(const std::string& path);

/// Timed command script: [{"t_sim": 1.5, "command": {"type": "set_task", "data": {...}}}, ...]
struct ScriptEntry {
  double t_sim = 0.0;
  Command command;
};
using CommandScript = std::vector<ScriptEntry>;

CommandScript parse_script(const std::string& document);
CommandScript load_script(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace arachne
