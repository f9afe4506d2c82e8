#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gridsched/harness.hpp"

namespace gridsched {

inline constexpr int kConfigSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a scenario document. Every key is optional except schema_version;
// unknown keys, wrong types and invalid values raise ConfigError.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

// The default scenario written out as a complete config document.
std::string scenario_to_json(const Scenario& scn);

}  // namespace gridsched
