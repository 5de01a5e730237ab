#include "phishdebate/model_backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <nlohmann/json.hpp>

namespace phishdebate {

using nlohmann::json;

std::string role_id_name(const RoleId& role) {
  switch (role.kind) {
    case RoleId::Kind::Moderator: return "moderator";
    case RoleId::Kind::Judge: return "judge";
    case RoleId::Kind::Baseline: return "baseline";
    case RoleId::Kind::Specialist:
      return "specialist:" + std::string(role.agent ? agent_id(*role.agent) : "unknown");
  }
  return "unknown";
}

std::string_view backend_error_kind_name(BackendErrorKind kind) {
  switch (kind) {
    case BackendErrorKind::Timeout: return "timeout";
    case BackendErrorKind::RateLimit: return "rate_limit";
    case BackendErrorKind::Transport: return "transport";
    case BackendErrorKind::RemoteRefusal: return "remote_refusal";
  }
  return "unknown";
}

double CompletionBackend::now_seconds() const {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(ScriptedBackendRules rules) : rules_(std::move(rules)) {}

ScriptedBackendRules ScriptedBackend::rules_from_json_file(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read scripted rules file: " + file.string());
  }
  json doc;
  in >> doc;
  ScriptedBackendRules rules;
  rules.default_reply = doc.value("default_reply", std::string{});
  rules.default_latency_seconds = doc.value("default_latency_seconds", 0.0);
  for (const auto& item : doc.value("rules", json::array())) {
    ScriptedRule rule;
    if (item.contains("match")) {
      rule.contains.push_back(item["match"].get<std::string>());
    }
    for (const auto& fragment : item.value("contains", json::array())) {
      rule.contains.push_back(fragment.get<std::string>());
    }
    rule.regex = item.value("regex", std::string{});
    rule.reply = item.at("reply").get<std::string>();
    rule.latency_seconds = item.value("latency_seconds", 0.0);
    if (item.contains("prompt_tokens")) {
      rule.prompt_tokens = item["prompt_tokens"].get<std::int64_t>();
    }
    if (item.contains("completion_tokens")) {
      rule.completion_tokens = item["completion_tokens"].get<std::int64_t>();
    }
    rules.rules.push_back(std::move(rule));
  }
  return rules;
}

ModelReply ScriptedBackend::complete(const ModelRequest& request) {
  const ScriptedRule* matched = nullptr;
  for (const ScriptedRule& rule : rules_.rules) {
    bool ok = true;
    for (const std::string& fragment : rule.contains) {
      if (request.prompt.find(fragment) == std::string::npos) {
        ok = false;
        break;
      }
    }
    if (ok && !rule.regex.empty()) {
      std::regex pattern(rule.regex);
      ok = std::regex_search(request.prompt, pattern);
    }
    if (ok) {
      matched = &rule;
      break;
    }
  }
  ModelReply reply;
  reply.model_name = request.model_name;
  if (matched) {
    reply.text = matched->reply;
    reply.latency_seconds = matched->latency_seconds;
    reply.prompt_tokens = matched->prompt_tokens;
    reply.completion_tokens = matched->completion_tokens;
  } else {
    reply.text = rules_.default_reply;
    reply.latency_seconds = rules_.default_latency_seconds;
  }
  {
    std::lock_guard lock(mutex_);
    virtual_clock_seconds_ += reply.latency_seconds;
    ++total_calls_;
    ++calls_by_role_[static_cast<int>(request.role.kind)];
    if (request.role.agent) {
      ++calls_by_agent_[static_cast<int>(*request.role.agent)];
    }
  }
  return reply;
}

double ScriptedBackend::now_seconds() const {
  std::lock_guard lock(mutex_);
  return virtual_clock_seconds_;
}

int ScriptedBackend::total_calls() const {
  std::lock_guard lock(mutex_);
  return total_calls_;
}

int ScriptedBackend::calls_for(RoleId::Kind kind) const {
  std::lock_guard lock(mutex_);
  auto it = calls_by_role_.find(static_cast<int>(kind));
  return it == calls_by_role_.end() ? 0 : it->second;
}

int ScriptedBackend::calls_for_agent(AgentKind agent) const {
  std::lock_guard lock(mutex_);
  auto it = calls_by_agent_.find(static_cast<int>(agent));
  return it == calls_by_agent_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// HttpBackend (definitions in http_backend.cpp; httplib stays out of this TU)

// ---------------------------------------------------------------------------
// InflightLimitedBackend

InflightLimitedBackend::InflightLimitedBackend(std::shared_ptr<CompletionBackend> inner,
                                               int max_inflight)
    : inner_(std::move(inner)), max_inflight_(std::max(1, max_inflight)) {}

ModelReply InflightLimitedBackend::complete(const ModelRequest& request) {
  {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return active_ < max_inflight_; });
    ++active_;
  }
  try {
    ModelReply reply = inner_->complete(request);
    {
      std::lock_guard lock(mutex_);
      --active_;
    }
    cv_.notify_one();
    return reply;
  } catch (...) {
    {
      std::lock_guard lock(mutex_);
      --active_;
    }
    cv_.notify_one();
    throw;
  }
}

double InflightLimitedBackend::now_seconds() const { return inner_->now_seconds(); }

// ---------------------------------------------------------------------------
// usage_summary

CostSummary usage_summary(const std::vector<ModelReply>& replies, const PriceTable& prices) {
  CostSummary summary;
  for (const ModelReply& reply : replies) {
    auto it = prices.find(reply.model_name);
    if (it == prices.end()) {
      summary.lower_bound = true;
      continue;
    }
    if (!reply.prompt_tokens || !reply.completion_tokens) {
      summary.lower_bound = true;
      if (reply.prompt_tokens) {
        summary.cost += static_cast<double>(*reply.prompt_tokens) * it->second.input_per_token;
      }
      if (reply.completion_tokens) {
        summary.cost +=
            static_cast<double>(*reply.completion_tokens) * it->second.output_per_token;
      }
      continue;
    }
    summary.cost += static_cast<double>(*reply.prompt_tokens) * it->second.input_per_token;
    summary.cost +=
        static_cast<double>(*reply.completion_tokens) * it->second.output_per_token;
  }
  return summary;
}

}  // namespace phishdebate
