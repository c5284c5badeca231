#pragma once

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conekernel::app {

using nlohmann::json;

enum class ParamType { number, integer, boolean, vec2, vec3 };

struct ParamSpec {
    std::string_view name;  ///< snake_case JSON key; the flag is --kebab-case
    ParamType type;
    bool required;
    json default_value;  ///< null: optional without default
    std::string_view help;
};

struct CommandSpec {
    std::string_view name;
    std::string_view summary;
    std::vector<ParamSpec> params;
};

const std::vector<CommandSpec>& command_table();
const CommandSpec* find_command(std::string_view name) noexcept;

std::string flag_name(std::string_view key);

struct RunConfig {
    std::string command;
    json parameters = json::object();
    std::uint64_t seed = 0;
    std::string output_dir;
};

/// Reads {"command", "parameters", "seed", "output_dir"}; missing keys keep their defaults.
RunConfig config_from_json(const json& doc);

/// Echo form; config_from_json(config_to_json(c)) reproduces c.
json config_to_json(const RunConfig& config);

/// Converts a flag string to the JSON value of the declared type.
json parse_flag_value(const ParamSpec& spec, const std::string& text);

/// Applies defaults, rejects unknown keys, checks required keys and types.
/// Throws InputError on any violation.
json resolve_parameters(const CommandSpec& spec, const json& given);

} // namespace conekernel::app
