#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "phishdebate/sample.hpp"
#include "phishdebate/templates.hpp"
#include "phishdebate/truncation.hpp"

namespace phishdebate {

enum class AgentKind { UrlAnalyst, HtmlStructure, ContentSemantic, BrandImpersonation };

/// Canonical agent order used everywhere a set of agents is serialized.
inline constexpr std::array<AgentKind, 4> kAllAgents = {
    AgentKind::UrlAnalyst, AgentKind::HtmlStructure, AgentKind::ContentSemantic,
    AgentKind::BrandImpersonation};

std::string_view agent_display_name(AgentKind kind);  // "URL Analyst", ...
std::string_view agent_id(AgentKind kind);            // "url_analyst", ... (JSON)
std::string_view agent_flag_name(AgentKind kind);     // "url", "html", "content", "brand"
std::optional<AgentKind> agent_from_flag_name(std::string_view name);
std::optional<AgentKind> agent_from_id(std::string_view id);

enum class Claim { Phishing, Legitimate, Uncertain };

std::string_view claim_name(Claim claim);  // "PHISHING", "LEGITIMATE", "UNCERTAIN"

/// One specialist reply for one round, parsed from the
/// Claim/Confidence/Evidence reply format. The raw reply is kept verbatim
/// for transcripts.
struct AgentResponse {
  AgentKind agent = AgentKind::UrlAnalyst;
  int round = 1;
  Claim claim = Claim::Uncertain;
  std::optional<double> confidence;  // in [0,1] when present
  std::string evidence;
  std::string raw_reply;
};

/// Outcome of one agent query in one round: either a parsed response or a
/// recorded failure (the debate continues without that agent's analysis).
struct RoundEntry {
  AgentKind agent = AgentKind::UrlAnalyst;
  int round = 1;
  std::optional<AgentResponse> response;
  std::string failure_reason;  // set when response is absent
  std::string raw_reply;       // kept even for failures, when available
};

class AgentParseError : public std::runtime_error {
 public:
  AgentParseError(const std::string& message, std::string raw_reply)
      : std::runtime_error(message), raw_reply_(std::move(raw_reply)) {}
  const std::string& raw_reply() const { return raw_reply_; }

 private:
  std::string raw_reply_;
};

/// Fills the agent's template with the inputs it is entitled to see:
/// UrlAnalyst gets the URL, HtmlStructure the truncated HTML,
/// ContentSemantic the truncated visible text, BrandImpersonation the URL
/// plus the truncated visible text.
std::string render_initial_prompt(AgentKind agent, const ProcessedSample& sample,
                                  const TokenBudget& budget,
                                  const PromptTemplates& templates = default_templates());

/// Initial prompt plus a delimited section with the peers' latest analyses
/// and an instruction to reconsider in the same reply format. Throws
/// std::invalid_argument when peer_context is empty.
std::string render_debate_prompt(AgentKind agent, const ProcessedSample& sample,
                                 const std::string& peer_context,
                                 const TokenBudget& budget,
                                 const PromptTemplates& templates = default_templates());

/// Parses a specialist reply. Field labels are matched case-insensitively
/// at line starts after optional list markers. The claim keyword mapping is
/// uniform across agents; a reply without a Claim line is a parse error.
AgentResponse parse_agent_response(const std::string& raw, AgentKind agent, int round);

/// Canonical reply block: "- Claim: ...\n- Confidence: ...\n- Evidence: ...".
/// parse_agent_response inverts it.
std::string format_agent_response(const AgentResponse& response);

/// Decimal confidence with at most four fractional digits, trailing zeros
/// trimmed ("0.88", "0.9", "1").
std::string format_confidence(double value);

}  // namespace phishdebate
