#pragma once

#include <string>

#include <json.hpp>

#include "arachne/arena.hpp"

namespace arachne::arena {

/// Shape object {"type":"rect",...} or {"type":"circle",...}; throws detail::FieldError.
Obstacle parse_obstacle_at(const nlohmann::json& j, const std::string& path);

}  // namespace arachne::arena
