#pragma once

#include "prach/experiment.hpp"

#include <json.hpp>

#include <filesystem>

namespace prach {

nlohmann::json gen_config_to_json(const GenConfig& g);
// Missing keys keep their defaults; unknown keys are a ConfigError.
GenConfig gen_config_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

// "a.b.c=value". The value is parsed as JSON when it parses, otherwise taken
// as a string; intermediate objects are created as needed.
void apply_override(nlohmann::json& doc, std::string_view assignment);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// Reads a config file (or starts from defaults when path is empty), applies
// overrides in order, validates.
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace prach
