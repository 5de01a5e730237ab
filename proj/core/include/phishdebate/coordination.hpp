#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "phishdebate/agents.hpp"
#include "phishdebate/templates.hpp"

namespace phishdebate {

enum class Assessment { Phishing, Legitimate, Uncertain };

std::string_view assessment_name(Assessment a);  // "PHISHING" / "LEGITIMATE" / "UNCERTAIN"

/// Moderator output after one round: whether consensus exists, which
/// assessment it supports, and whether the debate should continue.
/// Invariant: reached implies a binary assessment and no continuation.
struct ConsensusEvaluation {
  bool reached = false;
  Assessment assessment = Assessment::Uncertain;
  std::string reasoning;
  double confidence = 0.0;  // in [0,1]
  bool continue_debate = true;
};

/// Judge output: always a definitive binary assessment.
struct Verdict {
  Assessment assessment = Assessment::Phishing;  // never Uncertain
  double confidence = 0.0;
  std::string reasoning;
  std::string evidence_summary;
};

class CoordinationParseError : public std::runtime_error {
 public:
  CoordinationParseError(const std::string& message, std::string raw_reply)
      : std::runtime_error(message), raw_reply_(std::move(raw_reply)) {}
  const std::string& raw_reply() const { return raw_reply_; }

 private:
  std::string raw_reply_;
};

/// Moderator template plus one serialized block per agent response for the
/// round, in canonical agent order. Throws std::invalid_argument on an
/// empty response list.
std::string render_moderator_prompt(const std::vector<AgentResponse>& round_responses,
                                    int round,
                                    const PromptTemplates& templates = default_templates());

/// Parses the JSON consensus evaluation, tolerating a markdown code fence
/// and surrounding prose. Required keys: consensus ("Yes"/"No"),
/// assessment, reasoning, confidence in [0,1], continue_debate. Violating
/// the type invariants is a parse error.
ConsensusEvaluation parse_moderator_reply(const std::string& raw);

/// Judge template plus the chronologically ordered debate record. Failed
/// agent entries appear as "analysis unavailable". Moderator evaluations
/// are interleaved per round when provided. Throws std::invalid_argument on
/// an empty history.
std::string render_judge_prompt(const std::vector<std::vector<RoundEntry>>& rounds,
                                const std::vector<ConsensusEvaluation>& moderator_history,
                                int rounds_used,
                                const PromptTemplates& templates = default_templates());

/// Parses the final judgment JSON. An UNCERTAIN assessment (or anything
/// other than PHISHING/LEGITIMATE) is a parse error.
Verdict parse_judge_reply(const std::string& raw);

/// Canonical JSON serializations; parse_* invert them exactly.
std::string to_canonical_json(const ConsensusEvaluation& eval);
std::string to_canonical_json(const Verdict& verdict);

}  // namespace phishdebate
