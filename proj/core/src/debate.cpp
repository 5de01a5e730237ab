#include "phishdebate/debate.hpp"

#include <algorithm>
#include <future>

#include <nlohmann/json.hpp>

namespace phishdebate {

namespace {

using nlohmann::json;

constexpr std::string_view kJsonRetryLine = "Reply with valid JSON only.";

struct QueryRecord {
  std::vector<Exchange> exchanges;
};

ModelRequest make_request(const RoleId& role, std::string prompt, const RoleModel& model) {
  ModelRequest request;
  request.role = role;
  request.prompt = std::move(prompt);
  request.model_name = model.model_name;
  request.temperature = model.temperature;
  request.max_reply_tokens = model.max_reply_tokens;
  return request;
}

Exchange record_exchange(const ModelRequest& request, const ModelReply& reply, int round,
                         int attempt) {
  Exchange exchange;
  exchange.role = request.role;
  exchange.round = round;
  exchange.attempt = attempt;
  exchange.prompt = request.prompt;
  exchange.reply_text = reply.text;
  exchange.model_name = reply.model_name;
  exchange.latency_seconds = reply.latency_seconds;
  exchange.prompt_tokens = reply.prompt_tokens;
  exchange.completion_tokens = reply.completion_tokens;
  return exchange;
}

// Queries one specialist and parses its reply. Failures (backend or parse)
// become a failure-marker entry instead of aborting the round.
RoundEntry query_specialist(AgentKind agent, const std::string& prompt, int round,
                            const DebateConfig& config, CompletionBackend& backend,
                            QueryRecord& record) {
  RoundEntry entry;
  entry.agent = agent;
  entry.round = round;
  ModelRequest request =
      make_request(RoleId::specialist(agent), prompt, config.role_models.specialist);
  try {
    ModelReply reply = backend.complete(request);
    record.exchanges.push_back(record_exchange(request, reply, round, 1));
    entry.raw_reply = reply.text;
    entry.response = parse_agent_response(reply.text, agent, round);
  } catch (const AgentParseError& e) {
    entry.failure_reason = e.what();
  } catch (const BackendError& e) {
    entry.failure_reason = std::string("backend error (") +
                           std::string(backend_error_kind_name(e.kind())) + "): " + e.what();
  }
  return entry;
}

// Shared Moderator/Judge discipline: on a parse failure, re-ask with the
// JSON-only line appended, up to config.json_parse_retries extra attempts.
template <typename Parser>
auto query_json_role(const RoleId& role, const std::string& base_prompt,
                     const RoleModel& model, int round, const DebateConfig& config,
                     CompletionBackend& backend, QueryRecord& record, Parser parse)
    -> std::optional<decltype(parse(std::string{}))> {
  std::string prompt = base_prompt;
  for (int attempt = 1; attempt <= 1 + config.json_parse_retries; ++attempt) {
    if (attempt > 1) {
      prompt = base_prompt;
      prompt.append("\n\n");
      prompt.append(kJsonRetryLine);
    }
    ModelRequest request = make_request(role, prompt, model);
    try {
      ModelReply reply = backend.complete(request);
      record.exchanges.push_back(record_exchange(request, reply, round, attempt));
      return parse(reply.text);
    } catch (const CoordinationParseError&) {
      continue;
    } catch (const BackendError&) {
      continue;
    }
  }
  return std::nullopt;
}

std::vector<AgentResponse> successful_responses(const std::vector<RoundEntry>& entries) {
  std::vector<AgentResponse> responses;
  for (const RoundEntry& entry : entries) {
    if (entry.response) responses.push_back(*entry.response);
  }
  return responses;
}

}  // namespace

void validate_config(const DebateConfig& config) {
  if (config.active_agents.empty()) {
    throw ConfigError("at least one specialist agent must remain active");
  }
  if (config.max_rounds < 1 || config.max_rounds > 10) {
    throw ConfigError("max_rounds must be between 1 and 10");
  }
  if (config.consensus_threshold < 0.0 || config.consensus_threshold > 1.0) {
    throw ConfigError("consensus threshold must be in [0,1]");
  }
  if (config.json_parse_retries < 0) {
    throw ConfigError("json_parse_retries must be nonnegative");
  }
  try {
    validate_budget(config.budget);
  } catch (const TruncationError& e) {
    throw ConfigError(std::string("invalid token budget: ") + e.what());
  }
}

std::string aggregate_context(const std::vector<RoundEntry>& latest_entries) {
  if (latest_entries.empty()) {
    throw std::invalid_argument("aggregate_context requires at least one entry");
  }
  std::string context;
  for (AgentKind kind : kAllAgents) {
    for (const RoundEntry& entry : latest_entries) {
      if (entry.agent != kind) continue;
      if (!context.empty()) context.append("\n\n");
      context.push_back('[');
      context.append(agent_display_name(entry.agent));
      context.append("]\n");
      if (entry.response) {
        context.append(format_agent_response(*entry.response));
      } else {
        context.append("analysis unavailable");
      }
    }
  }
  return context;
}

DebateTranscript run_debate(const ProcessedSample& sample, const DebateConfig& config,
                            CompletionBackend& backend) {
  validate_config(config);

  DebateTranscript transcript;
  transcript.sample_id = sample.id;
  const double started = backend.now_seconds();

  // Active agents in canonical order.
  std::vector<AgentKind> agents;
  for (AgentKind kind : kAllAgents) {
    if (config.active_agents.count(kind)) agents.push_back(kind);
  }

  auto run_round = [&](int round, const std::string* peer_context) {
    std::vector<RoundEntry> entries(agents.size());
    std::vector<QueryRecord> records(agents.size());
    auto run_one = [&](std::size_t i) {
      AgentKind agent = agents[i];
      std::string prompt =
          peer_context
              ? render_debate_prompt(agent, sample, *peer_context, config.budget,
                                     config.templates)
              : render_initial_prompt(agent, sample, config.budget, config.templates);
      entries[i] = query_specialist(agent, prompt, round, config, backend, records[i]);
    };
    if (config.parallel_round_queries && agents.size() > 1) {
      std::vector<std::future<void>> tasks;
      tasks.reserve(agents.size());
      for (std::size_t i = 0; i < agents.size(); ++i) {
        tasks.push_back(std::async(std::launch::async, run_one, i));
      }
      for (auto& task : tasks) task.get();
    } else {
      for (std::size_t i = 0; i < agents.size(); ++i) run_one(i);
    }
    // Merge the per-agent exchange logs in canonical order so the
    // transcript does not depend on scheduling.
    for (QueryRecord& record : records) {
      for (Exchange& exchange : record.exchanges) {
        transcript.exchanges.push_back(std::move(exchange));
      }
    }
    return entries;
  };

  auto evaluate_round = [&](const std::vector<RoundEntry>& entries,
                            int round) -> ModeratorRecord {
    std::vector<AgentResponse> responses = successful_responses(entries);
    std::string prompt = render_moderator_prompt(responses, round, config.templates);
    QueryRecord record;
    auto eval = query_json_role(RoleId::moderator(), prompt, config.role_models.moderator,
                                round, config, backend, record,
                                [](const std::string& raw) { return parse_moderator_reply(raw); });
    for (Exchange& exchange : record.exchanges) {
      transcript.exchanges.push_back(std::move(exchange));
    }
    if (eval) return {*eval, false};
    // Unparseable after retries: treated as no consensus, debate continues.
    ConsensusEvaluation fallback;
    fallback.reached = false;
    fallback.assessment = Assessment::Uncertain;
    fallback.reasoning = "moderator reply could not be parsed";
    fallback.confidence = 0.0;
    fallback.continue_debate = true;
    return {fallback, true};
  };

  for (int round = 1; round <= config.max_rounds; ++round) {
    std::string context;
    const std::string* peer_context = nullptr;
    if (round > 1) {
      context = aggregate_context(transcript.rounds.back());
      peer_context = &context;
    }
    std::vector<RoundEntry> entries = run_round(round, peer_context);
    bool any_success =
        std::any_of(entries.begin(), entries.end(),
                    [](const RoundEntry& e) { return e.response.has_value(); });
    transcript.rounds.push_back(std::move(entries));
    if (!any_success) {
      throw DebateSampleError("every specialist failed in round " + std::to_string(round));
    }
    ModeratorRecord moderator = evaluate_round(transcript.rounds.back(), round);
    transcript.moderator_evals.push_back(moderator);
    if (moderator.eval.reached &&
        moderator.eval.confidence >= config.consensus_threshold) {
      break;
    }
  }

  transcript.rounds_used = static_cast<int>(transcript.rounds.size());
  transcript.consensus_reached = transcript.moderator_evals.back().eval.reached;
  transcript.early_termination =
      transcript.consensus_reached &&
      (transcript.rounds_used < config.max_rounds || transcript.rounds_used == 1);

  // Phase 4: the Judge always decides.
  {
    std::vector<ConsensusEvaluation> moderator_history;
    if (config.judge_sees_moderator) {
      for (const ModeratorRecord& record : transcript.moderator_evals) {
        moderator_history.push_back(record.eval);
      }
    }
    std::string prompt = render_judge_prompt(transcript.rounds, moderator_history,
                                             transcript.rounds_used, config.templates);
    QueryRecord record;
    auto verdict = query_json_role(RoleId::judge(), prompt, config.role_models.judge,
                                   /*round=*/0, config, backend, record,
                                   [](const std::string& raw) { return parse_judge_reply(raw); });
    for (Exchange& exchange : record.exchanges) {
      transcript.exchanges.push_back(std::move(exchange));
    }
    if (!verdict) {
      throw DebateSampleError("judge produced no parseable verdict");
    }
    transcript.verdict = *verdict;
  }

  transcript.wall_time_seconds = backend.now_seconds() - started;
  for (const Exchange& exchange : transcript.exchanges) {
    ++transcript.usage.requests;
    if (exchange.attempt > 1) ++transcript.usage.retries;
    transcript.usage.total_latency_seconds += exchange.latency_seconds;
    if (exchange.prompt_tokens && exchange.completion_tokens) {
      transcript.usage.prompt_tokens += *exchange.prompt_tokens;
      transcript.usage.completion_tokens += *exchange.completion_tokens;
    } else {
      transcript.usage.token_counts_complete = false;
    }
  }
  return transcript;
}

nlohmann::json transcript_to_json(const DebateTranscript& transcript) {
  json doc;
  doc["schema_version"] = 1;
  doc["sample_id"] = transcript.sample_id;
  doc["rounds"] = json::array();
  for (std::size_t r = 0; r < transcript.rounds.size(); ++r) {
    json round_doc;
    round_doc["round"] = r + 1;
    round_doc["entries"] = json::array();
    for (const RoundEntry& entry : transcript.rounds[r]) {
      json e;
      e["agent"] = std::string(agent_id(entry.agent));
      if (entry.response) {
        e["status"] = "ok";
        e["claim"] = std::string(claim_name(entry.response->claim));
        if (entry.response->confidence) {
          e["confidence"] = *entry.response->confidence;
        } else {
          e["confidence"] = nullptr;
        }
        e["evidence"] = entry.response->evidence;
        e["raw_reply"] = entry.response->raw_reply;
      } else {
        e["status"] = "failed";
        e["error"] = entry.failure_reason;
        e["raw_reply"] = entry.raw_reply;
      }
      round_doc["entries"].push_back(std::move(e));
    }
    doc["rounds"].push_back(std::move(round_doc));
  }
  doc["moderator_evals"] = json::array();
  for (std::size_t r = 0; r < transcript.moderator_evals.size(); ++r) {
    const ModeratorRecord& record = transcript.moderator_evals[r];
    json m;
    m["round"] = r + 1;
    m["reached"] = record.eval.reached;
    m["assessment"] = std::string(assessment_name(record.eval.assessment));
    m["confidence"] = record.eval.confidence;
    m["reasoning"] = record.eval.reasoning;
    m["continue_debate"] = record.eval.continue_debate;
    m["parse_failed"] = record.parse_failed;
    doc["moderator_evals"].push_back(std::move(m));
  }
  doc["verdict"] = {{"assessment", std::string(assessment_name(transcript.verdict.assessment))},
                    {"confidence", transcript.verdict.confidence},
                    {"reasoning", transcript.verdict.reasoning},
                    {"evidence_summary", transcript.verdict.evidence_summary}};
  doc["rounds_used"] = transcript.rounds_used;
  doc["early_termination"] = transcript.early_termination;
  doc["consensus_reached"] = transcript.consensus_reached;
  doc["wall_time_seconds"] = transcript.wall_time_seconds;
  doc["usage"] = {{"requests", transcript.usage.requests},
                  {"retries", transcript.usage.retries},
                  {"prompt_tokens", transcript.usage.prompt_tokens},
                  {"completion_tokens", transcript.usage.completion_tokens},
                  {"token_counts_complete", transcript.usage.token_counts_complete},
                  {"total_latency_seconds", transcript.usage.total_latency_seconds}};
  doc["exchanges"] = json::array();
  for (const Exchange& exchange : transcript.exchanges) {
    json e;
    e["role"] = role_id_name(exchange.role);
    e["round"] = exchange.round;
    e["attempt"] = exchange.attempt;
    e["prompt"] = exchange.prompt;
    e["reply"] = exchange.reply_text;
    e["model"] = exchange.model_name;
    e["latency_seconds"] = exchange.latency_seconds;
    if (exchange.prompt_tokens) e["prompt_tokens"] = *exchange.prompt_tokens;
    if (exchange.completion_tokens) e["completion_tokens"] = *exchange.completion_tokens;
    doc["exchanges"].push_back(std::move(e));
  }
  return doc;
}

}  // namespace phishdebate
