#pragma once

#include <string>

#include <json.hpp>

#include "arachne/commands.hpp"

namespace arachne::telemetry {

/// Schema-checks an already parsed command object; throws SchemaError.
Command command_from_json(const nlohmann::json& j);

}  // namespace arachne::telemetry
