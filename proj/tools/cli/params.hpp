#pragma once

// Parameter tables for the command-line verbs. Values resolve as
// defaults <- config file <- flags; every key is checked against the verb's
// table, so typos in config files fail instead of being ignored.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qw::cli {

enum class ParamType { Angle, Real, Int, Bool, Choice, Text };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::Real;
  nlohmann::json default_value;  // null: required
  std::string help;
  std::vector<std::string> choices;  // Choice only
  std::optional<double> min, max;    // numeric range, inclusive
};

struct VerbSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
};

const std::vector<VerbSpec>& verbs();
const VerbSpec& verb(const std::string& name);

// Radians from "1.5708", "pi", "-pi/4", "7pi/8", "3*pi/4", "2π". Throws
// qw::Error(InvalidArgument) on anything else.
double parse_angle(const std::string& text);

// One value from text (flags) or JSON (config file), checked against its spec.
nlohmann::json parse_value(const ParamSpec& spec, const std::string& text);
nlohmann::json check_value(const ParamSpec& spec, const nlohmann::json& value);

// Resolved parameters: every key of the verb present, typed and range-checked.
// `file` may hold "schema_version" and "command" besides the verb keys.
nlohmann::json resolve(const VerbSpec& v, const nlohmann::json& file,
                       const std::map<std::string, std::string>& flags);

// JSON Schema (draft 2020-12) covering every verb's config file.
nlohmann::json config_schema();

}  // namespace qw::cli
