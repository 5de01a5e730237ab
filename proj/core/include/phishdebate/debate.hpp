#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phishdebate/coordination.hpp"
#include "phishdebate/model_backend.hpp"
#include "phishdebate/sample.hpp"
#include "phishdebate/templates.hpp"
#include "phishdebate/truncation.hpp"

namespace phishdebate {

struct RoleModel {
  std::string model_name = "gpt-4o";
  double temperature = 0.0;
  int max_reply_tokens = 1024;
};

struct RoleModels {
  RoleModel specialist;
  RoleModel moderator;
  RoleModel judge;
};

/// Debate parameters. The Moderator and Judge are structural roles and
/// cannot be excluded; only the specialist set is configurable.
struct DebateConfig {
  int max_rounds = 3;                // in [1,10]
  double consensus_threshold = 0.7;  // tau, in [0,1]
  std::set<AgentKind> active_agents = {AgentKind::UrlAnalyst, AgentKind::HtmlStructure,
                                       AgentKind::ContentSemantic,
                                       AgentKind::BrandImpersonation};
  TokenBudget budget;
  RoleModels role_models;
  bool parallel_round_queries = true;
  // Whether the Judge prompt interleaves the Moderator's round evaluations
  // with the specialist history.
  bool judge_sees_moderator = true;
  // Extra attempts after an unparseable Moderator/Judge JSON reply, each
  // with "Reply with valid JSON only." appended.
  int json_parse_retries = 2;
  PromptTemplates templates = default_templates();
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a debate cannot produce a verdict (Judge failure, or every
/// specialist failing in one round).
class DebateSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One raw request/reply pair, kept verbatim so transcripts are fully
/// reconstructible. Retries appear as separate exchanges.
struct Exchange {
  RoleId role;
  int round = 0;  // 0 for the judge
  int attempt = 1;
  std::string prompt;
  std::string reply_text;
  std::string model_name;
  double latency_seconds = 0.0;
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
};

struct ModeratorRecord {
  ConsensusEvaluation eval;
  bool parse_failed = false;  // true when the synthetic no-consensus stand-in is used
};

struct UsageStats {
  int requests = 0;
  int retries = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool token_counts_complete = true;
  double total_latency_seconds = 0.0;
};

struct DebateTranscript {
  std::string sample_id;
  std::vector<std::vector<RoundEntry>> rounds;  // rounds[r] holds round r+1
  std::vector<ModeratorRecord> moderator_evals;
  Verdict verdict;
  int rounds_used = 0;
  bool early_termination = false;
  bool consensus_reached = false;
  double wall_time_seconds = 0.0;
  UsageStats usage;
  std::vector<Exchange> exchanges;
};

/// Rejects configs violating the debate invariants: empty specialist set,
/// max_rounds outside [1,10], threshold outside [0,1], invalid budget.
void validate_config(const DebateConfig& config);

/// Serializes the latest round for the next debate prompt: one block per
/// agent in canonical order, failures rendered as "analysis unavailable".
/// Throws std::invalid_argument on empty input.
std::string aggregate_context(const std::vector<RoundEntry>& latest_entries);

/// Runs the four-phase debate: independent round 1, Moderator consensus
/// check, debate rounds up to max_rounds with early termination when the
/// Moderator reports consensus at or above the threshold, and the Judge's
/// final verdict (always). Throws DebateSampleError when no verdict can be
/// produced.
DebateTranscript run_debate(const ProcessedSample& sample, const DebateConfig& config,
                            CompletionBackend& backend);

/// Versioned transcript JSON (schema_version 1).
nlohmann::json transcript_to_json(const DebateTranscript& transcript);

}  // namespace phishdebate
