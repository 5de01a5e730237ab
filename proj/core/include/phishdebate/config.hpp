#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phishdebate/debate.hpp"
#include "phishdebate/evaluation.hpp"
#include "phishdebate/model_backend.hpp"

namespace phishdebate {

/// Engine-level settings: backend wiring, per-role models, debate
/// parameters, token budgets, output location and the optional price table.
/// Sources merge as defaults < config file < command-line flags.
struct EngineConfig {
  std::string backend_kind = "live";  // "live" or "scripted"
  HttpBackendConfig http;
  std::filesystem::path scripted_rules_file;
  int max_inflight = 8;

  DebateConfig debate;  // includes the token budget and role models
  BaselineModel baseline_model;

  std::optional<std::filesystem::path> templates_dir;
  std::filesystem::path output_dir = "out";
  PriceTable price_table;
};

/// Parses a phishdebate.json config object over the defaults. Unknown keys
/// are rejected to catch typos early.
EngineConfig engine_config_from_json(const nlohmann::json& doc);
EngineConfig load_engine_config(const std::filesystem::path& file);

/// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<int> max_rounds;
  std::optional<double> tau;
  std::vector<std::string> exclude;  // agent flag names to drop
  std::optional<int> max_inflight;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> backend;  // "live" or "scripted:<rules-file>"
};

void apply_overrides(EngineConfig& config, const CliOverrides& overrides);

/// Builds the configured backend wrapped in the in-flight limiter. The
/// scripted kind requires a rules file.
std::shared_ptr<CompletionBackend> make_backend(const EngineConfig& config);

/// Templates per config: the built-ins unless templates_dir overrides them.
PromptTemplates resolve_templates(const EngineConfig& config);

}  // namespace phishdebate
