#include "phishdebate/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace phishdebate {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    if (!known.count(key)) {
      throw ConfigError("unknown config key '" + key + "' in " + where);
    }
  }
}

RoleModel role_model_from_json(const json& doc, const RoleModel& base) {
  RoleModel model = base;
  if (doc.contains("name")) model.model_name = doc["name"].get<std::string>();
  if (doc.contains("temperature")) model.temperature = doc["temperature"].get<double>();
  if (doc.contains("max_reply_tokens")) {
    model.max_reply_tokens = doc["max_reply_tokens"].get<int>();
  }
  reject_unknown_keys(doc, {"name", "temperature", "max_reply_tokens"}, "models entry");
  return model;
}

}  // namespace

EngineConfig engine_config_from_json(const json& doc) {
  EngineConfig config;
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(doc,
                      {"backend", "models", "debate", "budget", "templates_dir",
                       "output_dir", "price_table"},
                      "config root");

  if (doc.contains("backend")) {
    const json& backend = doc["backend"];
    reject_unknown_keys(backend,
                        {"kind", "endpoint", "path", "api_key_env", "timeout_seconds",
                         "max_attempts", "backoff_initial_ms", "backoff_factor",
                         "max_inflight", "rules_file"},
                        "backend");
    config.backend_kind = backend.value("kind", config.backend_kind);
    if (config.backend_kind != "live" && config.backend_kind != "scripted") {
      throw ConfigError("backend.kind must be 'live' or 'scripted'");
    }
    config.http.endpoint = backend.value("endpoint", config.http.endpoint);
    config.http.path = backend.value("path", config.http.path);
    config.http.api_key_env = backend.value("api_key_env", config.http.api_key_env);
    config.http.timeout_seconds =
        backend.value("timeout_seconds", config.http.timeout_seconds);
    config.http.max_attempts = backend.value("max_attempts", config.http.max_attempts);
    config.http.backoff_initial_ms =
        backend.value("backoff_initial_ms", config.http.backoff_initial_ms);
    config.http.backoff_factor =
        backend.value("backoff_factor", config.http.backoff_factor);
    config.max_inflight = backend.value("max_inflight", config.max_inflight);
    if (backend.contains("rules_file")) {
      config.scripted_rules_file = backend["rules_file"].get<std::string>();
    }
  }

  if (doc.contains("models")) {
    const json& models = doc["models"];
    reject_unknown_keys(models, {"default", "specialist", "moderator", "judge", "baseline"},
                        "models");
    RoleModel base;
    if (models.contains("default")) base = role_model_from_json(models["default"], base);
    config.debate.role_models.specialist = base;
    config.debate.role_models.moderator = base;
    config.debate.role_models.judge = base;
    config.baseline_model = {base.model_name, base.temperature, base.max_reply_tokens};
    if (models.contains("specialist")) {
      config.debate.role_models.specialist = role_model_from_json(models["specialist"], base);
    }
    if (models.contains("moderator")) {
      config.debate.role_models.moderator = role_model_from_json(models["moderator"], base);
    }
    if (models.contains("judge")) {
      config.debate.role_models.judge = role_model_from_json(models["judge"], base);
    }
    if (models.contains("baseline")) {
      RoleModel b = role_model_from_json(models["baseline"], base);
      config.baseline_model = {b.model_name, b.temperature, b.max_reply_tokens};
    }
  }

  if (doc.contains("debate")) {
    const json& debate = doc["debate"];
    reject_unknown_keys(debate,
                        {"max_rounds", "tau", "active_agents", "parallel_round_queries",
                         "judge_sees_moderator", "json_parse_retries"},
                        "debate");
    config.debate.max_rounds = debate.value("max_rounds", config.debate.max_rounds);
    config.debate.consensus_threshold =
        debate.value("tau", config.debate.consensus_threshold);
    config.debate.parallel_round_queries =
        debate.value("parallel_round_queries", config.debate.parallel_round_queries);
    config.debate.judge_sees_moderator =
        debate.value("judge_sees_moderator", config.debate.judge_sees_moderator);
    config.debate.json_parse_retries =
        debate.value("json_parse_retries", config.debate.json_parse_retries);
    if (debate.contains("active_agents")) {
      std::set<AgentKind> agents;
      for (const auto& name : debate["active_agents"]) {
        auto kind = agent_from_flag_name(name.get<std::string>());
        if (!kind) {
          throw ConfigError("unknown agent name '" + name.get<std::string>() +
                            "' in debate.active_agents");
        }
        agents.insert(*kind);
      }
      config.debate.active_agents = std::move(agents);
    }
  }

  if (doc.contains("budget")) {
    const json& budget = doc["budget"];
    reject_unknown_keys(
        budget, {"model_id", "html_token_limit", "text_token_limit", "chars_per_token"},
        "budget");
    config.debate.budget.model_id = budget.value("model_id", config.debate.budget.model_id);
    config.debate.budget.html_token_limit =
        budget.value("html_token_limit", config.debate.budget.html_token_limit);
    config.debate.budget.text_token_limit =
        budget.value("text_token_limit", config.debate.budget.text_token_limit);
    config.debate.budget.chars_per_token =
        budget.value("chars_per_token", config.debate.budget.chars_per_token);
  }

  if (doc.contains("templates_dir") && !doc["templates_dir"].is_null()) {
    config.templates_dir = std::filesystem::path(doc["templates_dir"].get<std::string>());
  }
  if (doc.contains("output_dir")) {
    config.output_dir = std::filesystem::path(doc["output_dir"].get<std::string>());
  }
  if (doc.contains("price_table")) {
    for (const auto& [model, prices] : doc["price_table"].items()) {
      PriceEntry entry;
      entry.input_per_token = prices.value("input_per_token", 0.0);
      entry.output_per_token = prices.value("output_per_token", 0.0);
      config.price_table[model] = entry;
    }
  }
  return config;
}

EngineConfig load_engine_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file: " + file.string());
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ConfigError("malformed JSON in config file: " + file.string());
  return engine_config_from_json(doc);
}

void apply_overrides(EngineConfig& config, const CliOverrides& overrides) {
  if (overrides.max_rounds) config.debate.max_rounds = *overrides.max_rounds;
  if (overrides.tau) config.debate.consensus_threshold = *overrides.tau;
  for (const std::string& name : overrides.exclude) {
    auto kind = agent_from_flag_name(name);
    if (!kind) throw ConfigError("unknown agent in --exclude: " + name);
    config.debate.active_agents.erase(*kind);
  }
  if (overrides.max_inflight) config.max_inflight = *overrides.max_inflight;
  if (overrides.out_dir) config.output_dir = *overrides.out_dir;
  if (overrides.backend) {
    const std::string& value = *overrides.backend;
    if (value == "live") {
      config.backend_kind = "live";
    } else if (value.rfind("scripted:", 0) == 0) {
      config.backend_kind = "scripted";
      config.scripted_rules_file = value.substr(9);
    } else {
      throw ConfigError("--backend must be 'live' or 'scripted:<rules-file>'");
    }
  }
}

std::shared_ptr<CompletionBackend> make_backend(const EngineConfig& config) {
  std::shared_ptr<CompletionBackend> inner;
  if (config.backend_kind == "scripted") {
    if (config.scripted_rules_file.empty()) {
      throw ConfigError("scripted backend requires a rules file");
    }
    inner = std::make_shared<ScriptedBackend>(
        ScriptedBackend::rules_from_json_file(config.scripted_rules_file));
  } else {
    inner = std::make_shared<HttpBackend>(config.http);
  }
  return std::make_shared<InflightLimitedBackend>(std::move(inner), config.max_inflight);
}

PromptTemplates resolve_templates(const EngineConfig& config) {
  if (config.templates_dir) return load_templates(*config.templates_dir);
  return default_templates();
}

}  // namespace phishdebate
