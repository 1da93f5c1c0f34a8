#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "m2m/engine.hpp"

namespace m2m::io {

using Json = nlohmann::json;

std::vector<std::string> preset_names();

/// Full configuration document for a named preset. Throws ValidationError
/// for an unknown name.
Json preset_json(std::string_view name);

/// Builds a validated config. The document is laid over the preset named by
/// its "scenario" key (nested objects merge key by key, "slices" replaces);
/// unknown keys are rejected.
sim::SimConfig config_from_json(const Json& doc);

/// Parses JSON text; syntax errors raise ParseError with line and column.
Json parse_json(std::string_view text);

sim::SimConfig parse_config(std::string_view text);
sim::SimConfig load_config(const std::filesystem::path& path);

/// Every field spelled out; loading it back yields the same config.
Json to_json(const sim::SimConfig& config);

std::string read_file(const std::filesystem::path& path);

}  // namespace m2m::io
