#include "phishdebate/model_backend.hpp"

#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "support/test_util.hpp"

using namespace phishdebate;
using nlohmann::json;

namespace {

ModelRequest request_with(const std::string& prompt) {
  ModelRequest request;
  request.role = RoleId::specialist(AgentKind::UrlAnalyst);
  request.prompt = prompt;
  request.model_name = "test-model";
  return request;
}

ScriptedBackendRules demo_rules() {
  ScriptedBackendRules rules;
  rules.default_reply = "default";
  rules.rules.push_back({{"URL analysis"}, "", "url reply", 0.0, std::nullopt, std::nullopt});
  rules.rules.push_back({{"URL analysis", "Round 2"}, "", "never reached", 0.0, std::nullopt,
                         std::nullopt});
  rules.rules.push_back({{}, "judge.*verdict", "regex reply", 0.0, std::nullopt, std::nullopt});
  return rules;
}

}  // namespace

TEST_SUITE("model_backend") {

TEST_CASE("scripted backend applies first matching rule") {
  ScriptedBackend backend(demo_rules());
  CHECK(backend.complete(request_with("please do URL analysis now")).text == "url reply");
  // Earlier rule still wins even though the later one also matches.
  CHECK(backend.complete(request_with("URL analysis Round 2")).text == "url reply");
  CHECK(backend.complete(request_with("the judge gives a verdict")).text == "regex reply");
  CHECK(backend.complete(request_with("nothing matches")).text == "default");
}

TEST_CASE("scripted backend is referentially transparent") {
  ScriptedBackend backend(demo_rules());
  std::string first = backend.complete(request_with("URL analysis")).text;
  for (int i = 0; i < 50; ++i) {
    CHECK(backend.complete(request_with("URL analysis")).text == first);
  }
}

TEST_CASE("scripted backend counts calls per role and agent") {
  ScriptedBackend backend(demo_rules());
  backend.complete(request_with("a"));
  ModelRequest moderator;
  moderator.role = RoleId::moderator();
  moderator.prompt = "m";
  moderator.model_name = "test";
  backend.complete(moderator);
  backend.complete(moderator);
  CHECK(backend.total_calls() == 3);
  CHECK(backend.calls_for(RoleId::Kind::Specialist) == 1);
  CHECK(backend.calls_for(RoleId::Kind::Moderator) == 2);
  CHECK(backend.calls_for(RoleId::Kind::Judge) == 0);
  CHECK(backend.calls_for_agent(AgentKind::UrlAnalyst) == 1);
}

TEST_CASE("scripted backend virtual clock advances by rule latency") {
  ScriptedBackendRules rules;
  rules.default_reply = "d";
  rules.default_latency_seconds = 1.5;
  ScriptedBackend backend(rules);
  CHECK(backend.now_seconds() == 0.0);
  backend.complete(request_with("x"));
  CHECK(backend.now_seconds() == 1.5);
  backend.complete(request_with("y"));
  CHECK(backend.now_seconds() == 3.0);
}

TEST_CASE("scripted rules load from a JSON file") {
  testutil::TempDir dir;
  testutil::write_file(dir.path() / "rules.json", R"({
    "default_reply": "fallback",
    "rules": [
      {"match": "alpha", "reply": "A", "prompt_tokens": 10, "completion_tokens": 5},
      {"contains": ["beta", "gamma"], "reply": "BG"},
      {"regex": "d[0-9]+", "reply": "R", "latency_seconds": 0.25}
    ]
  })");
  auto rules = ScriptedBackend::rules_from_json_file(dir.path() / "rules.json");
  ScriptedBackend backend(rules);
  auto a = backend.complete(request_with("contains alpha here"));
  CHECK(a.text == "A");
  REQUIRE(a.prompt_tokens.has_value());
  CHECK(*a.prompt_tokens == 10);
  CHECK(backend.complete(request_with("beta but not the other")).text == "fallback");
  CHECK(backend.complete(request_with("beta gamma both")).text == "BG");
  CHECK(backend.complete(request_with("match d42 here")).text == "R");
}

TEST_CASE("usage_summary sums token costs") {
  PriceTable prices;
  prices["m"] = {1e-6, 2e-6};
  CHECK(usage_summary({}, prices).cost == 0.0);

  ModelReply reply;
  reply.model_name = "m";
  reply.prompt_tokens = 1000;
  reply.completion_tokens = 500;
  auto one = usage_summary({reply}, prices);
  CHECK(one.cost == doctest::Approx(0.002));
  CHECK_FALSE(one.lower_bound);
}

TEST_CASE("usage_summary over a reply fixture matches the hand-computed total") {
  PriceTable prices;
  prices["m"] = {2e-6, 3e-6};
  std::vector<ModelReply> replies;
  double expected = 0.0;
  for (int i = 1; i <= 10; ++i) {
    ModelReply reply;
    reply.model_name = "m";
    reply.prompt_tokens = 100 * i;
    reply.completion_tokens = 10 * i;
    replies.push_back(reply);
    expected += 100 * i * 2e-6 + 10 * i * 3e-6;
  }
  auto total = usage_summary(replies, prices);
  CHECK(total.cost == doctest::Approx(expected));
  CHECK_FALSE(total.lower_bound);
}

TEST_CASE("usage_summary flags missing counts as a lower bound") {
  PriceTable prices;
  prices["m"] = {1e-6, 1e-6};
  ModelReply complete;
  complete.model_name = "m";
  complete.prompt_tokens = 100;
  complete.completion_tokens = 100;
  ModelReply partial;
  partial.model_name = "m";
  partial.prompt_tokens = 50;  // completion count missing
  auto summary = usage_summary({complete, partial}, prices);
  CHECK(summary.lower_bound);
  CHECK(summary.cost == doctest::Approx(100 * 1e-6 + 100 * 1e-6 + 50 * 1e-6));
}

TEST_CASE("http backend completes against a local chat-completions stub") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                          httplib::Response& res) {
    ++hits;
    json body = json::parse(req.body);
    REQUIRE(body["messages"].size() == 1);
    json reply = {
        {"model", body["model"]},
        {"choices", json::array({json{{"message", json{{"role", "assistant"},
                                                        {"content", "stub says hello"}}}}})},
        {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 3}}}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackendConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port);
  config.max_attempts = 3;
  config.backoff_initial_ms = 1.0;
  HttpBackend backend(config);
  ModelReply reply = backend.complete(request_with("hello"));
  CHECK(reply.text == "stub says hello");
  CHECK(reply.model_name == "test-model");
  REQUIRE(reply.prompt_tokens.has_value());
  CHECK(*reply.prompt_tokens == 12);
  REQUIRE(reply.completion_tokens.has_value());
  CHECK(*reply.completion_tokens == 3);
  CHECK(reply.latency_seconds >= 0.0);
  CHECK(hits == 1);

  server.stop();
  server_thread.join();
}

TEST_CASE("http backend retries rate limits and transient server errors") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    int n = ++hits;
    if (n == 1) {
      res.status = 429;
      return;
    }
    if (n == 2) {
      res.status = 503;
      return;
    }
    json reply = {{"model", "m"},
                  {"choices", json::array({json{
                                  {"message", json{{"content", "third time lucky"}}}}})}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackendConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port);
  config.max_attempts = 3;
  config.backoff_initial_ms = 1.0;
  HttpBackend backend(config);
  CHECK(backend.complete(request_with("x")).text == "third time lucky");
  CHECK(hits == 3);

  server.stop();
  server_thread.join();
}

TEST_CASE("http backend classifies an unreachable endpoint as transport") {
  HttpBackendConfig config;
  config.endpoint = "http://127.0.0.1:1";  // nothing listens there
  config.max_attempts = 3;
  config.backoff_initial_ms = 1.0;
  config.timeout_seconds = 2.0;
  HttpBackend backend(config);
  try {
    backend.complete(request_with("x"));
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::Transport);
    CHECK(std::string(e.what()).find("3 attempts") != std::string::npos);
  }
}

TEST_CASE("http backend does not retry explicit refusals") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
    res.set_content("bad key", "text/plain");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackendConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port);
  config.max_attempts = 3;
  config.backoff_initial_ms = 1.0;
  HttpBackend backend(config);
  try {
    backend.complete(request_with("x"));
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::RemoteRefusal);
  }
  CHECK(hits == 1);

  server.stop();
  server_thread.join();
}

TEST_CASE("inflight limiter caps concurrency") {
  class SlowBackend : public CompletionBackend {
   public:
    ModelReply complete(const ModelRequest&) override {
      int now = ++active_;
      peak_ = std::max(peak_.load(), now);
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      --active_;
      return {};
    }
    std::atomic<int> active_{0};
    std::atomic<int> peak_{0};
  };
  auto slow = std::make_shared<SlowBackend>();
  InflightLimitedBackend limited(slow, 3);
  std::vector<std::thread> threads;
  for (int i = 0; i < 12; ++i) {
    threads.emplace_back([&] { limited.complete(ModelRequest{}); });
  }
  for (auto& t : threads) t.join();
  CHECK(slow->peak_.load() <= 3);
}

}  // TEST_SUITE
