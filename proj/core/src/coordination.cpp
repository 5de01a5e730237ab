#include "phishdebate/coordination.hpp"

#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

namespace phishdebate {

namespace {

using nlohmann::json;

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

// Strips one markdown code fence when present, then extracts the first
// balanced JSON object (string- and escape-aware) from the remainder.
std::string extract_json_object(const std::string& raw) {
  std::string_view text = raw;
  std::size_t fence = text.find("```");
  if (fence != std::string_view::npos) {
    std::size_t body_start = text.find('\n', fence);
    if (body_start != std::string_view::npos) {
      std::size_t closing = text.find("```", body_start);
      if (closing != std::string_view::npos) {
        text = text.substr(body_start + 1, closing - body_start - 1);
      } else {
        text = text.substr(body_start + 1);
      }
    }
  }
  std::size_t start = text.find('{');
  if (start == std::string_view::npos) return {};
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) return std::string(text.substr(start, i - start + 1));
    }
  }
  return {};
}

json parse_object_or_throw(const std::string& raw, const char* who) {
  std::string object_text = extract_json_object(raw);
  if (object_text.empty()) {
    throw CoordinationParseError(std::string(who) + " reply contains no JSON object", raw);
  }
  json doc = json::parse(object_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw CoordinationParseError(std::string(who) + " reply is not valid JSON", raw);
  }
  return doc;
}

double require_confidence(const json& doc, const std::string& raw, const char* who) {
  if (!doc.contains("confidence") || !doc["confidence"].is_number()) {
    throw CoordinationParseError(std::string(who) + " reply lacks a numeric confidence", raw);
  }
  double value = doc["confidence"].get<double>();
  if (value < 0.0 || value > 1.0) {
    throw CoordinationParseError(std::string(who) + " confidence outside [0,1]", raw);
  }
  return value;
}

std::string require_string(const json& doc, const char* key, const std::string& raw,
                           const char* who) {
  if (!doc.contains(key) || !doc[key].is_string()) {
    throw CoordinationParseError(std::string(who) + " reply lacks string key '" + key + "'",
                                 raw);
  }
  return doc[key].get<std::string>();
}

Assessment parse_assessment(const std::string& value, bool allow_uncertain,
                            const std::string& raw, const char* who) {
  std::string lowered = to_lower(value);
  if (lowered == "phishing") return Assessment::Phishing;
  if (lowered == "legitimate") return Assessment::Legitimate;
  if (lowered == "uncertain" && allow_uncertain) return Assessment::Uncertain;
  throw CoordinationParseError(std::string(who) + " assessment '" + value + "' not allowed",
                               raw);
}

// Shared by the moderator prompt and the judge history: one block per
// agent using the canonical reply format.
void append_response_block(std::string& out, const AgentResponse& response) {
  out.push_back('[');
  out.append(agent_display_name(response.agent));
  out.append("]\n");
  out.append(format_agent_response(response));
  out.push_back('\n');
}

}  // namespace

std::string_view assessment_name(Assessment a) {
  switch (a) {
    case Assessment::Phishing: return "PHISHING";
    case Assessment::Legitimate: return "LEGITIMATE";
    case Assessment::Uncertain: return "UNCERTAIN";
  }
  return "";
}

std::string render_moderator_prompt(const std::vector<AgentResponse>& round_responses,
                                    int round, const PromptTemplates& templates) {
  if (round_responses.empty()) {
    throw std::invalid_argument("moderator prompt requires at least one agent response");
  }
  std::string analyses;
  for (AgentKind kind : kAllAgents) {
    for (const AgentResponse& response : round_responses) {
      if (response.agent != kind) continue;
      if (!analyses.empty()) analyses.push_back('\n');
      append_response_block(analyses, response);
    }
  }
  std::string prompt = substitute_placeholder(templates.moderator, "[ROUND_NUMBER]",
                                              std::to_string(round));
  return substitute_placeholder(std::move(prompt), "[AGENT_ANALYSES]", analyses);
}

ConsensusEvaluation parse_moderator_reply(const std::string& raw) {
  json doc = parse_object_or_throw(raw, "moderator");
  ConsensusEvaluation eval;
  std::string consensus = to_lower(require_string(doc, "consensus", raw, "moderator"));
  if (consensus != "yes" && consensus != "no") {
    throw CoordinationParseError("moderator consensus must be Yes or No", raw);
  }
  eval.reached = consensus == "yes";
  eval.assessment = parse_assessment(require_string(doc, "assessment", raw, "moderator"),
                                     /*allow_uncertain=*/true, raw, "moderator");
  eval.reasoning = require_string(doc, "reasoning", raw, "moderator");
  eval.confidence = require_confidence(doc, raw, "moderator");
  if (!doc.contains("continue_debate") || !doc["continue_debate"].is_boolean()) {
    throw CoordinationParseError("moderator reply lacks boolean continue_debate", raw);
  }
  eval.continue_debate = doc["continue_debate"].get<bool>();
  if (eval.reached && eval.assessment == Assessment::Uncertain) {
    throw CoordinationParseError("moderator reported consensus with UNCERTAIN assessment",
                                 raw);
  }
  if (eval.reached && eval.continue_debate) {
    throw CoordinationParseError("moderator reported consensus but asked to continue", raw);
  }
  return eval;
}

std::string render_judge_prompt(const std::vector<std::vector<RoundEntry>>& rounds,
                                const std::vector<ConsensusEvaluation>& moderator_history,
                                int rounds_used, const PromptTemplates& templates) {
  if (rounds.empty()) {
    throw std::invalid_argument("judge prompt requires at least one debate round");
  }
  std::string history = "The debate ran for " + std::to_string(rounds_used) +
                        " round(s).\n\n";
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    if (r > 0) history.push_back('\n');
    history.append("=== Round ");
    history.append(std::to_string(r + 1));
    history.append(" ===\n\n");
    for (AgentKind kind : kAllAgents) {
      for (const RoundEntry& entry : rounds[r]) {
        if (entry.agent != kind) continue;
        if (entry.response) {
          append_response_block(history, *entry.response);
        } else {
          history.push_back('[');
          history.append(agent_display_name(entry.agent));
          history.append("]\nanalysis unavailable\n");
        }
        history.push_back('\n');
      }
    }
    if (r < moderator_history.size()) {
      const ConsensusEvaluation& eval = moderator_history[r];
      history.append("[Moderator]\n");
      history.append("Consensus: ");
      history.append(eval.reached ? "Yes" : "No");
      history.append("\nAssessment: ");
      history.append(assessment_name(eval.assessment));
      history.append("\nConfidence: ");
      history.append(format_confidence(eval.confidence));
      history.append("\nReasoning: ");
      history.append(eval.reasoning);
      history.push_back('\n');
    }
  }
  while (!history.empty() && history.back() == '\n') history.pop_back();
  return substitute_placeholder(templates.judge, "[DEBATE_HISTORY]", history);
}

Verdict parse_judge_reply(const std::string& raw) {
  json doc = parse_object_or_throw(raw, "judge");
  Verdict verdict;
  verdict.assessment = parse_assessment(require_string(doc, "assessment", raw, "judge"),
                                        /*allow_uncertain=*/false, raw, "judge");
  verdict.confidence = require_confidence(doc, raw, "judge");
  verdict.reasoning = require_string(doc, "reasoning", raw, "judge");
  verdict.evidence_summary = require_string(doc, "evidence_summary", raw, "judge");
  return verdict;
}

std::string to_canonical_json(const ConsensusEvaluation& eval) {
  json doc;
  doc["consensus"] = eval.reached ? "Yes" : "No";
  doc["assessment"] = std::string(assessment_name(eval.assessment));
  doc["reasoning"] = eval.reasoning;
  doc["confidence"] = eval.confidence;
  doc["continue_debate"] = eval.continue_debate;
  return doc.dump(2);
}

std::string to_canonical_json(const Verdict& verdict) {
  json doc;
  doc["assessment"] = std::string(assessment_name(verdict.assessment));
  doc["confidence"] = verdict.confidence;
  doc["reasoning"] = verdict.reasoning;
  doc["evidence_summary"] = verdict.evidence_summary;
  return doc.dump(2);
}

}  // namespace phishdebate
