#include "phishdebate/coordination.hpp"

#include <doctest.h>

#include <string>
#include <vector>

#include "support/generators.hpp"

using namespace phishdebate;

namespace {

AgentResponse response_of(AgentKind agent, Claim claim, double confidence,
                          const std::string& evidence, int round = 1) {
  AgentResponse response;
  response.agent = agent;
  response.round = round;
  response.claim = claim;
  response.confidence = confidence;
  response.evidence = evidence;
  return response;
}

const std::string kModeratorYes =
    R"({"consensus":"Yes","assessment":"PHISHING","reasoning":"all four agents agree","confidence":0.88,"continue_debate":false})";

}  // namespace

TEST_SUITE("coordination") {

TEST_CASE("moderator prompt holds one block per response in canonical order") {
  std::vector<AgentResponse> responses = {
      response_of(AgentKind::BrandImpersonation, Claim::Phishing, 0.8, "wells path"),
      response_of(AgentKind::UrlAnalyst, Claim::Phishing, 0.85, "/wp-includes/"),
      response_of(AgentKind::ContentSemantic, Claim::Legitimate, 0.6, "no urgency"),
      response_of(AgentKind::HtmlStructure, Claim::Legitimate, 0.55, "no forms"),
  };
  std::string prompt = render_moderator_prompt(responses, 1);
  CHECK(prompt.find("Round 1 specialist analyses:") != std::string::npos);
  std::size_t url = prompt.find("[URL Analyst]");
  std::size_t html = prompt.find("[HTML Structure]");
  std::size_t content = prompt.find("[Content Semantic]");
  std::size_t brand = prompt.find("[Brand Impersonation]");
  REQUIRE(url != std::string::npos);
  REQUIRE(html != std::string::npos);
  REQUIRE(content != std::string::npos);
  REQUIRE(brand != std::string::npos);
  CHECK(url < html);
  CHECK(html < content);
  CHECK(content < brand);
  // The 2-2 split is visible to the moderator.
  CHECK(prompt.find("PHISHING") != std::string::npos);
  CHECK(prompt.find("LEGITIMATE") != std::string::npos);
}

TEST_CASE("moderator prompt accepts a single response after exclusions") {
  std::vector<AgentResponse> one = {
      response_of(AgentKind::UrlAnalyst, Claim::Phishing, 0.9, "bad tld")};
  std::string prompt = render_moderator_prompt(one, 1);
  CHECK(prompt.find("[URL Analyst]") != std::string::npos);
  CHECK(prompt.find("[HTML Structure]") == std::string::npos);
}

TEST_CASE("moderator prompt rejects the empty list") {
  CHECK_THROWS_AS(render_moderator_prompt({}, 1), std::invalid_argument);
}

TEST_CASE("moderator reply parses the documented schema") {
  ConsensusEvaluation eval = parse_moderator_reply(kModeratorYes);
  CHECK(eval.reached);
  CHECK(eval.assessment == Assessment::Phishing);
  CHECK(eval.confidence == doctest::Approx(0.88));
  CHECK_FALSE(eval.continue_debate);
  CHECK(eval.reasoning == "all four agents agree");
}

TEST_CASE("fenced moderator replies parse identically") {
  std::string fenced = "```json\n" + kModeratorYes + "\n```";
  ConsensusEvaluation eval = parse_moderator_reply(fenced);
  CHECK(eval.reached);
  CHECK(eval.confidence == doctest::Approx(0.88));

  std::string prosy = "Here is my evaluation:\n\n" + kModeratorYes + "\n\nThank you.";
  CHECK(parse_moderator_reply(prosy).reached);
}

TEST_CASE("moderator consensus with UNCERTAIN assessment is rejected") {
  CHECK_THROWS_AS(
      parse_moderator_reply(
          R"({"consensus":"Yes","assessment":"UNCERTAIN","reasoning":"x","confidence":0.8,"continue_debate":false})"),
      CoordinationParseError);
}

TEST_CASE("moderator consensus asking to continue is rejected") {
  CHECK_THROWS_AS(
      parse_moderator_reply(
          R"({"consensus":"Yes","assessment":"PHISHING","reasoning":"x","confidence":0.8,"continue_debate":true})"),
      CoordinationParseError);
}

TEST_CASE("moderator parse rejects malformed or incomplete replies") {
  CHECK_THROWS_AS(parse_moderator_reply("no json here"), CoordinationParseError);
  CHECK_THROWS_AS(parse_moderator_reply("{\"consensus\":\"Yes\"}"), CoordinationParseError);
  CHECK_THROWS_AS(
      parse_moderator_reply(
          R"({"consensus":"maybe","assessment":"PHISHING","reasoning":"x","confidence":0.8,"continue_debate":false})"),
      CoordinationParseError);
  CHECK_THROWS_AS(
      parse_moderator_reply(
          R"({"consensus":"No","assessment":"PHISHING","reasoning":"x","confidence":1.8,"continue_debate":true})"),
      CoordinationParseError);
}

TEST_CASE("moderator parse normalizes key case") {
  ConsensusEvaluation eval = parse_moderator_reply(
      R"({"consensus":"no","assessment":"uncertain","reasoning":"split","confidence":0.5,"continue_debate":true})");
  CHECK_FALSE(eval.reached);
  CHECK(eval.assessment == Assessment::Uncertain);
  CHECK(eval.continue_debate);
}

TEST_CASE("canonical serialization round-trips through the parser") {
  testgen::Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    ConsensusEvaluation eval;
    eval.reached = testgen::pick(rng, 0, 1) == 1;
    if (eval.reached) {
      eval.assessment =
          testgen::pick(rng, 0, 1) ? Assessment::Phishing : Assessment::Legitimate;
      eval.continue_debate = false;
    } else {
      int a = testgen::pick(rng, 0, 2);
      eval.assessment = a == 0   ? Assessment::Phishing
                        : a == 1 ? Assessment::Legitimate
                                 : Assessment::Uncertain;
      eval.continue_debate = testgen::pick(rng, 0, 1) == 1;
    }
    eval.confidence = testgen::pick(rng, 0, 100) / 100.0;
    eval.reasoning = testgen::sentence(rng, testgen::pick(rng, 1, 6));
    ConsensusEvaluation parsed = parse_moderator_reply(to_canonical_json(eval));
    CHECK(parsed.reached == eval.reached);
    CHECK(parsed.assessment == eval.assessment);
    CHECK(parsed.confidence == eval.confidence);
    CHECK(parsed.reasoning == eval.reasoning);
    CHECK(parsed.continue_debate == eval.continue_debate);
  }
}

TEST_CASE("judge prompt lists rounds chronologically with moderator notes") {
  std::vector<std::vector<RoundEntry>> rounds(2);
  RoundEntry entry;
  entry.agent = AgentKind::UrlAnalyst;
  entry.round = 1;
  entry.response = response_of(AgentKind::UrlAnalyst, Claim::Phishing, 0.85, "bad path");
  rounds[0].push_back(entry);
  RoundEntry failed;
  failed.agent = AgentKind::HtmlStructure;
  failed.round = 1;
  failed.failure_reason = "no Claim line";
  rounds[0].push_back(failed);
  RoundEntry second = entry;
  second.round = 2;
  second.response->round = 2;
  rounds[1].push_back(second);

  std::vector<ConsensusEvaluation> moderator(1);
  moderator[0].reached = false;
  moderator[0].assessment = Assessment::Uncertain;
  moderator[0].reasoning = "agents split";
  moderator[0].confidence = 0.5;
  moderator[0].continue_debate = true;

  std::string prompt = render_judge_prompt(rounds, moderator, 2);
  std::size_t round1 = prompt.find("=== Round 1 ===");
  std::size_t round2 = prompt.find("=== Round 2 ===");
  REQUIRE(round1 != std::string::npos);
  REQUIRE(round2 != std::string::npos);
  CHECK(round1 < round2);
  CHECK(prompt.find("analysis unavailable") != std::string::npos);
  CHECK(prompt.find("[Moderator]") != std::string::npos);
  CHECK(prompt.find("definitive decision between PHISHING or LEGITIMATE") !=
        std::string::npos);

  // Pure function of the history: identical bytes on a second render.
  CHECK(render_judge_prompt(rounds, moderator, 2) == prompt);
}

TEST_CASE("judge prompt rejects an empty history") {
  CHECK_THROWS_AS(render_judge_prompt({}, {}, 0), std::invalid_argument);
}

TEST_CASE("judge reply parses the binary verdict") {
  Verdict verdict = parse_judge_reply(
      R"({"assessment":"PHISHING","confidence":0.88,"reasoning":"path spoofing","evidence_summary":"wells path"})");
  CHECK(verdict.assessment == Assessment::Phishing);
  CHECK(verdict.confidence == doctest::Approx(0.88));
  CHECK(verdict.evidence_summary == "wells path");

  Verdict legit = parse_judge_reply(
      R"({"assessment":"LEGITIMATE","confidence":1.0,"reasoning":"r","evidence_summary":"s"})");
  CHECK(legit.assessment == Assessment::Legitimate);
  CHECK(legit.confidence == doctest::Approx(1.0));
}

TEST_CASE("judge never yields an uncertain verdict") {
  CHECK_THROWS_AS(
      parse_judge_reply(
          R"({"assessment":"UNCERTAIN","confidence":0.5,"reasoning":"r","evidence_summary":"s"})"),
      CoordinationParseError);
  CHECK_THROWS_AS(
      parse_judge_reply(
          R"({"assessment":"maybe","confidence":0.5,"reasoning":"r","evidence_summary":"s"})"),
      CoordinationParseError);
}

TEST_CASE("judge canonical serialization round-trips") {
  Verdict verdict;
  verdict.assessment = Assessment::Legitimate;
  verdict.confidence = 0.73;
  verdict.reasoning = "consistent benign signals";
  verdict.evidence_summary = "no credential harvesting";
  Verdict parsed = parse_judge_reply(to_canonical_json(verdict));
  CHECK(parsed.assessment == verdict.assessment);
  CHECK(parsed.confidence == verdict.confidence);
  CHECK(parsed.reasoning == verdict.reasoning);
  CHECK(parsed.evidence_summary == verdict.evidence_summary);
}

}  // TEST_SUITE
