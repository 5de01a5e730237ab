#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "phishdebate/model_backend.hpp"

namespace phishdebate {

namespace {

using nlohmann::json;

struct AttemptFailure {
  BackendErrorKind kind = BackendErrorKind::Transport;
  std::string message = "no attempt made";
  bool retryable = false;
};

bool parse_endpoint(const std::string& endpoint, bool& tls, std::string& host, int& port) {
  std::string rest = endpoint;
  tls = false;
  if (rest.rfind("https://", 0) == 0) {
    tls = true;
    rest = rest.substr(8);
  } else if (rest.rfind("http://", 0) == 0) {
    rest = rest.substr(7);
  }
  while (!rest.empty() && rest.back() == '/') rest.pop_back();
  if (rest.find('/') != std::string::npos) {
    return false;  // a request path belongs in the separate path setting
  }
  std::size_t colon = rest.rfind(':');
  if (colon != std::string::npos) {
    host = rest.substr(0, colon);
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (...) {
      return false;
    }
  } else {
    host = rest;
    port = tls ? 443 : 80;
  }
  return !host.empty();
}

// Extracts the reply from a 2xx chat-completion body. Returns nullopt and
// fills `failure` when the body is not usable.
std::optional<ModelReply> parse_completion_body(const std::string& body,
                                                const ModelRequest& request,
                                                AttemptFailure& failure) {
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    failure = {BackendErrorKind::Transport, "malformed completion response body", true};
    return std::nullopt;
  }
  ModelReply reply;
  const auto& choice = doc["choices"][0];
  if (choice.contains("message") && choice["message"].contains("content") &&
      choice["message"]["content"].is_string()) {
    reply.text = choice["message"]["content"].get<std::string>();
  } else if (choice.contains("text") && choice["text"].is_string()) {
    reply.text = choice["text"].get<std::string>();
  } else {
    failure = {BackendErrorKind::Transport, "completion response has no content", true};
    return std::nullopt;
  }
  reply.model_name = doc.value("model", request.model_name);
  if (doc.contains("usage")) {
    const auto& usage = doc["usage"];
    if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number()) {
      reply.prompt_tokens = usage["prompt_tokens"].get<std::int64_t>();
    }
    if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number()) {
      reply.completion_tokens = usage["completion_tokens"].get<std::int64_t>();
    }
  }
  return reply;
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (!parse_endpoint(config_.endpoint, tls_, host_, port_)) {
    throw BackendError(BackendErrorKind::Transport,
                       "invalid backend endpoint: " + config_.endpoint);
  }
}

ModelReply HttpBackend::complete(const ModelRequest& request) {
  json body;
  body["model"] = request.model_name;
  body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_reply_tokens;
  const std::string payload = body.dump();

  std::string api_key;
  if (!config_.api_key_env.empty()) {
    if (const char* value = std::getenv(config_.api_key_env.c_str())) {
      api_key = value;
    }
  }

  const auto started = std::chrono::steady_clock::now();
  AttemptFailure last;
  const std::string base_url =
      (tls_ ? "https://" : "http://") + host_ + ":" + std::to_string(port_);
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    httplib::Client client(base_url);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    client.set_write_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    httplib::Headers headers;
    if (!api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key);
    }
    auto result = client.Post(config_.path, headers, payload, "application/json");

    if (!result) {
      auto err = result.error();
      bool timed_out = err == httplib::Error::ConnectionTimeout ||
                       err == httplib::Error::Read || err == httplib::Error::Write;
      last = {timed_out ? BackendErrorKind::Timeout : BackendErrorKind::Transport,
              "transport failure: " + httplib::to_string(err), true};
    } else if (result->status == 429) {
      last = {BackendErrorKind::RateLimit, "rate limited (HTTP 429)", true};
    } else if (result->status >= 500) {
      last = {BackendErrorKind::Transport,
              "server error (HTTP " + std::to_string(result->status) + ")", true};
    } else if (result->status >= 400) {
      last = {BackendErrorKind::RemoteRefusal,
              "request refused (HTTP " + std::to_string(result->status) + "): " + result->body,
              false};
    } else if (auto reply = parse_completion_body(result->body, request, last)) {
      reply->latency_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      return *reply;
    }

    if (!last.retryable || attempt == config_.max_attempts) break;
    double delay_ms = config_.backoff_initial_ms;
    for (int k = 1; k < attempt; ++k) delay_ms *= config_.backoff_factor;
    delay_ms = std::min(delay_ms, config_.backoff_max_ms);
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
  }
  throw BackendError(last.kind, last.message + " (after " +
                                     std::to_string(config_.max_attempts) + " attempts)");
}

}  // namespace phishdebate
