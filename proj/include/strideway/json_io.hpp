#pragma once

#include <filesystem>

#include <json.hpp>

#include "strideway/config.hpp"
#include "strideway/recording.hpp"
#include "strideway/simulator.hpp"

namespace strideway {

nlohmann::ordered_json config_to_json(const SessionConfig& cfg);
/// Missing keys keep their defaults; unknown keys and wrong types throw
/// ConfigError naming the dotted field path. The result is validated.
SessionConfig config_from_json(const nlohmann::json& j);
SessionConfig load_config(const std::filesystem::path& file);

/// Synthetic input description for the simulator.
struct ScenarioFile {
  WalkerParams walker;
  Scenario scenario;
  bool apply_load_modifiers = true;
  double recall_fraction = 1.0;  // share of presented numbers the simulated participant reports
};

nlohmann::ordered_json scenario_file_to_json(const ScenarioFile& s);
ScenarioFile scenario_file_from_json(const nlohmann::json& j);
ScenarioFile load_scenario_file(const std::filesystem::path& file);

nlohmann::ordered_json event_to_json(const SessionEvent& e);
SessionEvent event_from_json(const nlohmann::ordered_json& j);

}  // namespace strideway
