#pragma once

// Path-aware field access shared by the arena, config and protocol readers.

#include <cmath>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

namespace arachne::detail {

using nlohmann::json;

class FieldError : public std::runtime_error {
public:
  FieldError(std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)), message_(message)
  {
  }
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

private:
  std::string path_;
  std::string message_;
};

inline std::string join(const std::string& path, const std::string& key)
{
  return path.empty() ? key : path + "." + key;
}

inline std::string join(const std::string& path, std::size_t i)
{
  return path + "[" + std::to_string(i) + "]";
}

inline const json& require_object(const json& j, const std::string& path)
{
  if (!j.is_object()) {
    throw FieldError(path.empty() ? "<root>" : path, "expected an object");
  }
  return j;
}

// Every key must be known, so a misspelled field fails instead of being ignored.
inline void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys)
{
  require_object(obj, path);
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw FieldError(join(path, key), "unknown field");
    }
  }
}

inline const json* find(const json& obj, const char* key)
{
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double as_number(const json& v, const std::string& path)
{
  if (!v.is_number()) {
    throw FieldError(path, "expected a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw FieldError(path, "must be finite");
  }
  return d;
}

inline double number(const json& obj, const char* key, const std::string& path)
{
  const json* v = find(obj, key);
  if (!v) {
    throw FieldError(join(path, key), "missing field");
  }
  return as_number(*v, join(path, key));
}

inline double number_or(const json& obj, const char* key, const std::string& path, double fallback)
{
  const json* v = find(obj, key);
  return v ? as_number(*v, join(path, key)) : fallback;
}

inline bool boolean_or(const json& obj, const char* key, const std::string& path, bool fallback)
{
  const json* v = find(obj, key);
  if (!v) {
    return fallback;
  }
  if (!v->is_boolean()) {
    throw FieldError(join(path, key), "expected a boolean");
  }
  return v->get<bool>();
}

inline std::string string_or(const json& obj, const char* key, const std::string& path, const std::string& fallback)
{
  const json* v = find(obj, key);
  if (!v) {
    return fallback;
  }
  if (!v->is_string()) {
    throw FieldError(join(path, key), "expected a string");
  }
  return v->get<std::string>();
}

inline Eigen::Vector2d vec2(const json& obj, const char* key, const std::string& path)
{
  const json* v = find(obj, key);
  const std::string p = join(path, key);
  if (!v) {
    throw FieldError(p, "missing field");
  }
  if (!v->is_array() || v->size() != 2) {
    throw FieldError(p, "expected [x, y]");
  }
  return {as_number((*v)[0], join(p, 0)), as_number((*v)[1], join(p, 1))};
}

inline const json* array_or_null(const json& obj, const char* key, const std::string& path)
{
  const json* v = find(obj, key);
  if (v && !v->is_array()) {
    throw FieldError(join(path, key), "expected an array");
  }
  return v;
}

}  // namespace arachne::detail
