#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phishdebate/agents.hpp"

namespace phishdebate {

/// Which role issued a request. Specialists carry their agent kind;
/// Baseline marks the single-agent comparison methods.
struct RoleId {
  enum class Kind { Specialist, Moderator, Judge, Baseline };
  Kind kind = Kind::Specialist;
  std::optional<AgentKind> agent;  // set iff kind == Specialist

  static RoleId specialist(AgentKind a) { return {Kind::Specialist, a}; }
  static RoleId moderator() { return {Kind::Moderator, std::nullopt}; }
  static RoleId judge() { return {Kind::Judge, std::nullopt}; }
  static RoleId baseline() { return {Kind::Baseline, std::nullopt}; }
};

std::string role_id_name(const RoleId& role);

struct ModelRequest {
  RoleId role;
  std::string prompt;
  std::string model_name;
  double temperature = 0.0;
  int max_reply_tokens = 1024;
};

struct ModelReply {
  std::string text;
  std::string model_name;
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
  double latency_seconds = 0.0;  // full request time including retries
};

enum class BackendErrorKind { Timeout, RateLimit, Transport, RemoteRefusal };

std::string_view backend_error_kind_name(BackendErrorKind kind);

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  BackendErrorKind kind() const { return kind_; }

 private:
  BackendErrorKind kind_;
};

/// Completion backend contract. Implementations must be safe under
/// concurrent complete() calls. now_seconds() drives transcript timing; the
/// scripted backend substitutes a deterministic virtual clock so repeated
/// runs produce identical transcripts.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual ModelReply complete(const ModelRequest& request) = 0;
  virtual double now_seconds() const;
};

/// One scripted rule: the reply fires when every `contains` fragment occurs
/// in the prompt (and the regex matches, when given). First matching rule
/// wins.
struct ScriptedRule {
  std::vector<std::string> contains;
  std::string regex;  // optional ECMAScript pattern, searched in the prompt
  std::string reply;
  double latency_seconds = 0.0;
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
};

struct ScriptedBackendRules {
  std::vector<ScriptedRule> rules;
  std::string default_reply;
  double default_latency_seconds = 0.0;
};

/// Deterministic in-memory backend for tests and offline runs. Replies are
/// a pure function of the prompt; call counters and a virtual clock are the
/// only state.
class ScriptedBackend : public CompletionBackend {
 public:
  explicit ScriptedBackend(ScriptedBackendRules rules);

  static ScriptedBackendRules rules_from_json_file(const std::filesystem::path& file);

  ModelReply complete(const ModelRequest& request) override;
  double now_seconds() const override;

  // Call accounting for protocol tests.
  int total_calls() const;
  int calls_for(RoleId::Kind kind) const;
  int calls_for_agent(AgentKind agent) const;

 private:
  ScriptedBackendRules rules_;
  mutable std::mutex mutex_;
  double virtual_clock_seconds_ = 0.0;
  int total_calls_ = 0;
  std::map<int, int> calls_by_role_;
  std::map<int, int> calls_by_agent_;
};

struct HttpBackendConfig {
  std::string endpoint = "http://127.0.0.1:8080";  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "PHISHDEBATE_API_KEY";
  double timeout_seconds = 120.0;
  int max_attempts = 3;
  double backoff_initial_ms = 500.0;
  double backoff_factor = 2.0;
  double backoff_max_ms = 30000.0;
};

/// Chat-completions HTTP client: POSTs {model, messages, temperature,
/// max_tokens} and reads choices[0].message.content plus usage counts.
/// Transient failures (timeouts, 429, 5xx, transport errors) are retried
/// with exponential backoff; 4xx refusals are not.
class HttpBackend : public CompletionBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ModelReply complete(const ModelRequest& request) override;

 private:
  HttpBackendConfig config_;
  std::string host_;
  int port_ = 80;
  bool tls_ = false;
};

/// Decorator enforcing a global ceiling on in-flight requests across all
/// concurrent debates.
class InflightLimitedBackend : public CompletionBackend {
 public:
  InflightLimitedBackend(std::shared_ptr<CompletionBackend> inner, int max_inflight);
  ModelReply complete(const ModelRequest& request) override;
  double now_seconds() const override;

 private:
  std::shared_ptr<CompletionBackend> inner_;
  int max_inflight_;
  int active_ = 0;
  std::mutex mutex_;
  std::condition_variable cv_;
};

struct PriceEntry {
  double input_per_token = 0.0;
  double output_per_token = 0.0;
};

using PriceTable = std::map<std::string, PriceEntry>;

struct CostSummary {
  double cost = 0.0;
  bool lower_bound = false;  // true when some replies lacked token counts
};

/// Sums prompt and completion token costs across replies. Replies without
/// token counts contribute nothing and flag the total as a lower bound.
CostSummary usage_summary(const std::vector<ModelReply>& replies, const PriceTable& prices);

}  // namespace phishdebate
