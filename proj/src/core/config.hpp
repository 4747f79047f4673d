#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "core/sim.hpp"

namespace geofuse {

/// Parse and validate a scenario configuration document.
/// Unknown keys are rejected; errors name the JSON path of the offending key.
ScenarioConfig parse_config_json(const nlohmann::json& doc);

/// Load from file. Throws ConfigError on I/O, parse, or validation failure.
ScenarioConfig parse_config(const std::string& path);

/// Apply a dotted-path override ("monte_carlo.num_runs=200") to a raw
/// JSON document before validation.
void apply_override(nlohmann::json& doc, const std::string& key, const std::string& value);

/// Read a config file into raw JSON without validating.
nlohmann::json load_config_json(const std::string& path);

/// Fully resolved configuration (defaults filled in), round-trippable
/// through parse_config_json.
nlohmann::json resolved_config_json(const ScenarioConfig& cfg);

/// Write errors.csv and run_meta.json into dir (created if missing).
/// On failure, partially written files are removed.
void emit_results(const MonteCarloSummary& summary, const ScenarioConfig& cfg,
                  const std::string& dir, double wall_time_s);

}  // namespace geofuse
