#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "phishdebate/coordination.hpp"
#include "phishdebate/model_backend.hpp"
#include "phishdebate/sample.hpp"
#include "phishdebate/templates.hpp"
#include "phishdebate/truncation.hpp"

namespace phishdebate {

enum class BaselineMethod { Direct, CoT };

std::string_view baseline_method_name(BaselineMethod method);  // "direct" / "cot"

enum class ConfidenceLevel { High, Medium, Low };

std::string_view confidence_level_name(ConfidenceLevel level);

/// Single-model baseline outcome. An indecisive or malformed reply scores
/// as Uncertain rather than erroring; that is the misclassification
/// accounting path.
struct BaselineResult {
  BaselineMethod method = BaselineMethod::Direct;
  Assessment classification = Assessment::Uncertain;
  std::optional<ConfidenceLevel> confidence_level;  // CoT only
  std::string reasoning;
  std::optional<std::array<std::string, 5>> steps;  // CoT only; gaps marked
  double wall_time_seconds = 0.0;
  std::string raw_reply;
  std::string prompt;
  std::string model_name;
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
};

/// Marker stored in a CoT step slot whose STEP line was missing.
inline constexpr std::string_view kMissingStepMarker = "[missing]";

struct BaselineModel {
  std::string model_name = "gpt-4o";
  double temperature = 0.0;
  int max_reply_tokens = 1024;
};

/// Direct prompting: one classification keyword leads the reply. Both
/// keywords present without a leading one, or neither, scores Uncertain.
BaselineResult run_direct(const ProcessedSample& sample, CompletionBackend& backend,
                          const TokenBudget& budget, const BaselineModel& model = {},
                          const PromptTemplates& templates = default_templates());

/// Chain-of-Thought prompting: parses STEP 1..5, CLASSIFICATION, CONFIDENCE
/// and REASONING. A missing or non-binary CLASSIFICATION scores Uncertain.
BaselineResult run_cot(const ProcessedSample& sample, CompletionBackend& backend,
                       const TokenBudget& budget, const BaselineModel& model = {},
                       const PromptTemplates& templates = default_templates());

/// Exposed for tests: the classification rules applied to raw reply text.
Assessment parse_direct_classification(const std::string& raw);
BaselineResult parse_cot_reply(const std::string& raw);

}  // namespace phishdebate
