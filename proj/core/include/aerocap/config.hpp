#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "aerocap/experiments.hpp"
#include "aerocap/simulator.hpp"

namespace aerocap {

inline constexpr int kConfigSchemaVersion = 1;

/// Raised for malformed or invalid configuration; the message starts with the
/// offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a command needs. Angles are stored in radians; the document
/// spells them in degrees (keys ending in `_deg`).
struct Config {
  std::string preset = "default";  // "default" or "mound", applied before overrides
  Scenario scenario;
  SweepOptions sweep;
};

/// Parses a config document. Every key is optional; unknown keys and type
/// mismatches raise ConfigError with the field path. The result is validated.
Config config_from_json(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

/// Fully resolved document, suitable for the run manifest and for re-running.
nlohmann::json config_to_json(const Config& config);

/// Scenario preset by name; throws ConfigError for unknown names.
Scenario preset_scenario(const std::string& name);

}  // namespace aerocap
