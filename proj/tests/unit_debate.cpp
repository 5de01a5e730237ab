#include "phishdebate/debate.hpp"

#include <doctest.h>

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "support/test_util.hpp"

using namespace phishdebate;
using nlohmann::json;

namespace {

// Prompt fingerprints: stable phrases from each template plus the peer
// section marker for rounds 2+ and the round header for the moderator.
const std::string kUrlHead = "URL analysis";
const std::string kHtmlHead = "expert in web security";
const std::string kContentHead = "language expert";
const std::string kBrandHead = "brand impersonation detection expert";
const std::string kPeerMark = "Peer analyses from previous round:";
const std::string kModeratorHead = "moderator overseeing";
const std::string kJudgeHead = "cybersecurity judge";

std::string specialist_reply(const std::string& claim, double confidence,
                             const std::string& evidence) {
  return "- Claim: " + claim + "\n- Confidence: " + std::to_string(confidence) +
         "\n- Evidence: " + evidence;
}

std::string moderator_reply(bool reached, const std::string& assessment, double confidence) {
  json doc;
  doc["consensus"] = reached ? "Yes" : "No";
  doc["assessment"] = assessment;
  doc["reasoning"] = "scripted";
  doc["confidence"] = confidence;
  doc["continue_debate"] = !reached;
  return doc.dump();
}

std::string judge_reply(const std::string& assessment, double confidence) {
  json doc;
  doc["assessment"] = assessment;
  doc["confidence"] = confidence;
  doc["reasoning"] = "scripted judgment";
  doc["evidence_summary"] = "scripted evidence";
  return doc.dump();
}

void add_rule(ScriptedBackendRules& rules, std::vector<std::string> contains,
              std::string reply) {
  ScriptedRule rule;
  rule.contains = std::move(contains);
  rule.reply = std::move(reply);
  rules.rules.push_back(std::move(rule));
}

ProcessedSample sample_fixture() {
  ProcessedSample sample;
  sample.id = "case-study";
  sample.url = "https://mail.mxcapital.com.br/wp-includes/wells/wells/page/index.htm";
  sample.cleaned_html = "<html><body><p>Not Found</p></body></html>";
  sample.visible_text = "Not Found";
  sample.label = Label::Phishing;
  return sample;
}

// All four agents agree immediately; moderator consents with the given
// confidence; judge confirms.
ScriptedBackendRules unanimous_rules(double moderator_confidence) {
  ScriptedBackendRules rules;
  rules.default_reply = specialist_reply("PHISHING", 0.9, "scripted unanimity");
  add_rule(rules, {kModeratorHead}, moderator_reply(true, "PHISHING", moderator_confidence));
  add_rule(rules, {kJudgeHead}, judge_reply("PHISHING", 0.95));
  return rules;
}

ScriptedBackendRules never_consensus_rules() {
  ScriptedBackendRules rules;
  rules.default_reply = specialist_reply("PHISHING", 0.6, "half-hearted");
  add_rule(rules, {kModeratorHead}, moderator_reply(false, "UNCERTAIN", 0.4));
  add_rule(rules, {kJudgeHead}, judge_reply("LEGITIMATE", 0.7));
  return rules;
}

// The Fig. 5 style two-round session: URL + Brand say phishing, HTML +
// Content say legitimate, then everyone converges in round 2.
ScriptedBackendRules two_round_rules() {
  ScriptedBackendRules rules;
  add_rule(rules, {kUrlHead, kPeerMark},
           specialist_reply("PHISHING", 0.9, "/wp-includes/ exposure confirmed"));
  add_rule(rules, {kUrlHead},
           specialist_reply("PHISHING", 0.85, "directory string /wp-includes/wells/wells/"));
  add_rule(rules, {kBrandHead, kPeerMark},
           specialist_reply("PHISHING", 0.9, "Wells Fargo impersonation"));
  add_rule(rules, {kBrandHead},
           specialist_reply("PHISHING", 0.8, "wells path implies Wells Fargo"));
  add_rule(rules, {kHtmlHead, kPeerMark},
           specialist_reply("PHISHING", 0.75, "decoy error page outweighs missing forms"));
  add_rule(rules, {kHtmlHead}, specialist_reply("LEGITIMATE", 0.6, "no forms or iframes"));
  add_rule(rules, {kContentHead, kPeerMark},
           specialist_reply("PHISHING", 0.7, "benign error pages are common decoys"));
  add_rule(rules, {kContentHead},
           specialist_reply("LEGITIMATE", 0.65, "no persuasive language"));
  add_rule(rules, {kModeratorHead, "Round 1"}, moderator_reply(false, "UNCERTAIN", 0.5));
  add_rule(rules, {kModeratorHead, "Round 2"}, moderator_reply(true, "PHISHING", 0.88));
  add_rule(rules, {kJudgeHead}, judge_reply("PHISHING", 0.88));
  rules.default_reply = "unused";
  return rules;
}

DebateConfig config_with(int max_rounds, double tau) {
  DebateConfig config;
  config.max_rounds = max_rounds;
  config.consensus_threshold = tau;
  return config;
}

}  // namespace

TEST_SUITE("debate_engine") {

TEST_CASE("validate_config accepts the default settings") {
  CHECK_NOTHROW(validate_config(config_with(3, 0.7)));
}

TEST_CASE("validate_config rejects invariant violations") {
  DebateConfig empty = config_with(3, 0.7);
  empty.active_agents.clear();
  CHECK_THROWS_AS(validate_config(empty), ConfigError);

  CHECK_THROWS_AS(validate_config(config_with(11, 0.7)), ConfigError);
  CHECK_THROWS_AS(validate_config(config_with(0, 0.7)), ConfigError);
  CHECK_THROWS_AS(validate_config(config_with(3, 1.5)), ConfigError);
  CHECK_THROWS_AS(validate_config(config_with(3, -0.1)), ConfigError);

  DebateConfig bad_budget = config_with(3, 0.7);
  bad_budget.budget.chars_per_token = 0.0;
  CHECK_THROWS_AS(validate_config(bad_budget), ConfigError);
}

TEST_CASE("every single-agent exclusion setting validates") {
  for (AgentKind excluded : kAllAgents) {
    DebateConfig config = config_with(3, 0.7);
    config.active_agents.erase(excluded);
    CHECK_NOTHROW(validate_config(config));
  }
}

TEST_CASE("aggregate_context orders agents canonically and marks failures") {
  std::vector<RoundEntry> entries;
  RoundEntry brand;
  brand.agent = AgentKind::BrandImpersonation;
  brand.response = AgentResponse{AgentKind::BrandImpersonation, 1, Claim::Phishing, 0.8,
                                 "wells", ""};
  RoundEntry url;
  url.agent = AgentKind::UrlAnalyst;
  url.response = AgentResponse{AgentKind::UrlAnalyst, 1, Claim::Phishing, 0.85, "path", ""};
  RoundEntry html;
  html.agent = AgentKind::HtmlStructure;
  html.failure_reason = "parse error";
  entries.push_back(brand);
  entries.push_back(url);
  entries.push_back(html);

  std::string context = aggregate_context(entries);
  std::size_t url_at = context.find("[URL Analyst]");
  std::size_t html_at = context.find("[HTML Structure]");
  std::size_t brand_at = context.find("[Brand Impersonation]");
  REQUIRE(url_at != std::string::npos);
  REQUIRE(html_at != std::string::npos);
  REQUIRE(brand_at != std::string::npos);
  CHECK(url_at < html_at);
  CHECK(html_at < brand_at);
  CHECK(context.find("analysis unavailable") != std::string::npos);
  CHECK(context.find("[Content Semantic]") == std::string::npos);

  CHECK_THROWS_AS(aggregate_context({}), std::invalid_argument);
}

TEST_CASE("unanimous round 1 terminates early with one judge call") {
  ScriptedBackend backend(unanimous_rules(0.9));
  DebateTranscript transcript =
      run_debate(sample_fixture(), config_with(3, 0.7), backend);
  CHECK(transcript.rounds_used == 1);
  CHECK(transcript.consensus_reached);
  CHECK(transcript.early_termination);
  CHECK(transcript.verdict.assessment == Assessment::Phishing);
  CHECK(backend.calls_for(RoleId::Kind::Specialist) == 4);
  CHECK(backend.calls_for(RoleId::Kind::Moderator) == 1);
  CHECK(backend.calls_for(RoleId::Kind::Judge) == 1);
  REQUIRE(transcript.rounds.size() == 1);
  CHECK(transcript.rounds[0].size() == 4);
}

TEST_CASE("perpetual disagreement runs max_rounds and still gets a verdict") {
  ScriptedBackend backend(never_consensus_rules());
  DebateTranscript transcript =
      run_debate(sample_fixture(), config_with(3, 0.7), backend);
  CHECK(transcript.rounds_used == 3);
  CHECK_FALSE(transcript.consensus_reached);
  CHECK_FALSE(transcript.early_termination);
  CHECK(transcript.verdict.assessment == Assessment::Legitimate);
  CHECK(backend.calls_for(RoleId::Kind::Specialist) == 12);
  CHECK(backend.calls_for(RoleId::Kind::Moderator) == 3);
  CHECK(backend.calls_for(RoleId::Kind::Judge) == 1);
}

TEST_CASE("max_rounds one runs phases 1, 2 and 4 only") {
  ScriptedBackend backend(never_consensus_rules());
  DebateTranscript transcript =
      run_debate(sample_fixture(), config_with(1, 0.7), backend);
  CHECK(transcript.rounds_used == 1);
  CHECK(backend.calls_for(RoleId::Kind::Specialist) == 4);
  CHECK(backend.calls_for(RoleId::Kind::Moderator) == 1);
  CHECK(backend.calls_for(RoleId::Kind::Judge) == 1);
  // No round-2 prompts were built: no exchange contains the peer marker.
  for (const Exchange& exchange : transcript.exchanges) {
    CHECK(exchange.prompt.find(kPeerMark) == std::string::npos);
  }
}

TEST_CASE("consensus below the threshold does not stop the debate") {
  ScriptedBackend backend(unanimous_rules(0.5));  // reached=true, conf 0.5 < tau
  DebateTranscript transcript =
      run_debate(sample_fixture(), config_with(2, 0.7), backend);
  CHECK(transcript.rounds_used == 2);
  CHECK(backend.calls_for(RoleId::Kind::Specialist) == 8);
  CHECK(backend.calls_for(RoleId::Kind::Moderator) == 2);
  // The final moderator evaluation still reports reached.
  CHECK(transcript.consensus_reached);
  CHECK_FALSE(transcript.early_termination);
}

TEST_CASE("two-round convergence replays the case study") {
  ScriptedBackend backend(two_round_rules());
  DebateTranscript transcript =
      run_debate(sample_fixture(), config_with(3, 0.7), backend);
  CHECK(transcript.rounds_used == 2);
  CHECK(transcript.consensus_reached);
  CHECK(transcript.early_termination);
  CHECK(transcript.verdict.assessment == Assessment::Phishing);
  CHECK(transcript.verdict.confidence == doctest::Approx(0.88));
  REQUIRE(transcript.moderator_evals.size() == 2);
  CHECK_FALSE(transcript.moderator_evals[0].eval.reached);
  CHECK(transcript.moderator_evals[1].eval.reached);
  CHECK(transcript.moderator_evals[1].eval.confidence == doctest::Approx(0.88));
  // Round 1 split two against two.
  int phishing = 0, legitimate = 0;
  for (const RoundEntry& entry : transcript.rounds[0]) {
    REQUIRE(entry.response.has_value());
    (entry.response->claim == Claim::Phishing ? phishing : legitimate)++;
  }
  CHECK(phishing == 2);
  CHECK(legitimate == 2);
  // Round 2 converged.
  for (const RoundEntry& entry : transcript.rounds[1]) {
    REQUIRE(entry.response.has_value());
    CHECK(entry.response->claim == Claim::Phishing);
  }
}

TEST_CASE("agent exclusion reduces queries and keeps the protocol intact") {
  ScriptedBackendRules rules = unanimous_rules(0.9);
  ScriptedBackend backend(rules);
  DebateConfig config = config_with(3, 0.7);
  config.active_agents = {AgentKind::UrlAnalyst, AgentKind::BrandImpersonation};
  DebateTranscript transcript = run_debate(sample_fixture(), config, backend);
  CHECK(backend.calls_for(RoleId::Kind::Specialist) == 2);
  CHECK(backend.calls_for_agent(AgentKind::HtmlStructure) == 0);
  CHECK(transcript.rounds[0].size() == 2);
  CHECK(transcript.verdict.assessment == Assessment::Phishing);
}

TEST_CASE("a failing specialist is recorded and the debate continues") {
  ScriptedBackendRules rules = two_round_rules();
  // Make the HTML agent unparseable in round 1 (overrides the later rule).
  rules.rules.insert(rules.rules.begin(),
                     ScriptedRule{{kHtmlHead}, "", "no structured fields here", 0.0,
                                  std::nullopt, std::nullopt});
  ScriptedBackend backend(rules);
  DebateTranscript transcript =
      run_debate(sample_fixture(), config_with(2, 0.7), backend);
  const std::vector<RoundEntry>& round1 = transcript.rounds[0];
  REQUIRE(round1.size() == 4);
  bool saw_failure = false;
  for (const RoundEntry& entry : round1) {
    if (entry.agent == AgentKind::HtmlStructure) {
      CHECK_FALSE(entry.response.has_value());
      CHECK_FALSE(entry.failure_reason.empty());
      saw_failure = true;
    }
  }
  CHECK(saw_failure);
  // The judge prompt marks the failed entry as unavailable.
  bool judge_seen = false;
  for (const Exchange& exchange : transcript.exchanges) {
    if (exchange.role.kind == RoleId::Kind::Judge) {
      judge_seen = true;
      CHECK(exchange.prompt.find("analysis unavailable") != std::string::npos);
    }
  }
  CHECK(judge_seen);
}

TEST_CASE("all specialists failing is a sample error") {
  ScriptedBackendRules rules;
  rules.default_reply = "nothing parseable";
  add_rule(rules, {kModeratorHead}, moderator_reply(false, "UNCERTAIN", 0.1));
  add_rule(rules, {kJudgeHead}, judge_reply("PHISHING", 0.5));
  ScriptedBackend backend(rules);
  CHECK_THROWS_AS(run_debate(sample_fixture(), config_with(2, 0.7), backend),
                  DebateSampleError);
}

TEST_CASE("unparseable moderator becomes no-consensus and the debate continues") {
  ScriptedBackendRules rules;
  rules.default_reply = specialist_reply("PHISHING", 0.9, "ev");
  add_rule(rules, {kModeratorHead}, "not json at all");
  add_rule(rules, {kJudgeHead}, judge_reply("PHISHING", 0.9));
  ScriptedBackend backend(rules);
  DebateTranscript transcript =
      run_debate(sample_fixture(), config_with(2, 0.7), backend);
  CHECK(transcript.rounds_used == 2);
  CHECK_FALSE(transcript.consensus_reached);
  REQUIRE(transcript.moderator_evals.size() == 2);
  CHECK(transcript.moderator_evals[0].parse_failed);
  CHECK(transcript.moderator_evals[1].parse_failed);
  // Initial attempt plus two retries per round, with the JSON-only line.
  CHECK(backend.calls_for(RoleId::Kind::Moderator) == 6);
  int retry_exchanges = 0;
  for (const Exchange& exchange : transcript.exchanges) {
    if (exchange.role.kind == RoleId::Kind::Moderator && exchange.attempt > 1) {
      ++retry_exchanges;
      CHECK(exchange.prompt.find("Reply with valid JSON only.") != std::string::npos);
    }
  }
  CHECK(retry_exchanges == 4);
  CHECK(transcript.verdict.assessment == Assessment::Phishing);
}

TEST_CASE("unparseable judge is a sample error after retries") {
  ScriptedBackendRules rules;
  rules.default_reply = specialist_reply("PHISHING", 0.9, "ev");
  add_rule(rules, {kModeratorHead}, moderator_reply(true, "PHISHING", 0.9));
  add_rule(rules, {kJudgeHead}, "still not json");
  ScriptedBackend backend(rules);
  CHECK_THROWS_AS(run_debate(sample_fixture(), config_with(1, 0.7), backend),
                  DebateSampleError);
  CHECK(backend.calls_for(RoleId::Kind::Judge) == 3);
}

TEST_CASE("parallel and sequential runs produce identical transcripts modulo timing") {
  DebateConfig parallel = config_with(3, 0.7);
  parallel.parallel_round_queries = true;
  DebateConfig sequential = parallel;
  sequential.parallel_round_queries = false;

  ScriptedBackend backend_a(two_round_rules());
  ScriptedBackend backend_b(two_round_rules());
  json a = transcript_to_json(run_debate(sample_fixture(), parallel, backend_a));
  json b = transcript_to_json(run_debate(sample_fixture(), sequential, backend_b));
  testutil::strip_timing(a);
  testutil::strip_timing(b);
  CHECK(a == b);
}

TEST_CASE("transcripts reconstruct every prompt and reply verbatim") {
  ScriptedBackend backend(two_round_rules());
  DebateTranscript transcript =
      run_debate(sample_fixture(), config_with(3, 0.7), backend);
  // 8 specialist + 2 moderator + 1 judge exchanges.
  CHECK(transcript.exchanges.size() == 11);
  CHECK(transcript.usage.requests == 11);
  CHECK(transcript.usage.retries == 0);
  for (const Exchange& exchange : transcript.exchanges) {
    CHECK_FALSE(exchange.prompt.empty());
    CHECK_FALSE(exchange.reply_text.empty());
  }
  // Raw replies land verbatim in the round entries.
  for (const auto& round : transcript.rounds) {
    for (const RoundEntry& entry : round) {
      REQUIRE(entry.response.has_value());
      CHECK_FALSE(entry.response->raw_reply.empty());
    }
  }
}

TEST_CASE("judge_sees_moderator knob removes moderator notes from the judge prompt") {
  DebateConfig config = config_with(3, 0.7);
  config.judge_sees_moderator = false;
  ScriptedBackend backend(two_round_rules());
  DebateTranscript transcript = run_debate(sample_fixture(), config, backend);
  for (const Exchange& exchange : transcript.exchanges) {
    if (exchange.role.kind == RoleId::Kind::Judge) {
      CHECK(exchange.prompt.find("[Moderator]") == std::string::npos);
    }
  }
  CHECK(transcript.verdict.assessment == Assessment::Phishing);
}

}  // TEST_SUITE
