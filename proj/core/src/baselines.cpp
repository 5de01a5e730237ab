#include "phishdebate/baselines.hpp"

#include <cctype>

namespace phishdebate {

namespace {

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

std::string render_baseline_prompt(const std::string& template_text,
                                   const ProcessedSample& sample,
                                   const TokenBudget& budget) {
  auto html = truncate_html(sample.cleaned_html, budget);
  auto text = truncate_text(sample.visible_text, budget);
  std::string prompt = substitute_placeholder(template_text, "[TARGET_URL]", sample.url);
  prompt = substitute_placeholder(std::move(prompt), "[TRUNCATED_HTML_CONTENT]", html.content);
  return substitute_placeholder(std::move(prompt), "[TRUNCATED_VISIBLE_TEXT]", text.content);
}

ModelReply complete_baseline(const std::string& prompt, CompletionBackend& backend,
                             const BaselineModel& model) {
  ModelRequest request;
  request.role = RoleId::baseline();
  request.prompt = prompt;
  request.model_name = model.model_name;
  request.temperature = model.temperature;
  request.max_reply_tokens = model.max_reply_tokens;
  return backend.complete(request);
}

// Finds the first occurrence of `keyword` at a case-insensitive match.
std::size_t find_ci(const std::string& haystack_lower, std::string_view keyword) {
  return haystack_lower.find(keyword);
}

std::optional<ConfidenceLevel> parse_confidence_level(std::string_view text) {
  std::string lowered = to_lower(text);
  if (lowered.find("high") != std::string::npos) return ConfidenceLevel::High;
  if (lowered.find("medium") != std::string::npos) return ConfidenceLevel::Medium;
  if (lowered.find("low") != std::string::npos) return ConfidenceLevel::Low;
  return std::nullopt;
}

// Matches "LABEL:" at the start of a line, case-insensitively, returning
// the remainder.
std::optional<std::string_view> match_line_label(std::string_view line,
                                                 std::string_view label) {
  std::string_view rest = line;
  std::size_t i = 0;
  while (i < rest.size() && is_space(rest[i])) ++i;
  if (i + label.size() > rest.size()) return std::nullopt;
  for (std::size_t k = 0; k < label.size(); ++k) {
    if (std::toupper(static_cast<unsigned char>(rest[i + k])) !=
        std::toupper(static_cast<unsigned char>(label[k]))) {
      return std::nullopt;
    }
  }
  i += label.size();
  while (i < rest.size() && is_space(rest[i])) ++i;
  if (i >= rest.size() || rest[i] != ':') return std::nullopt;
  return rest.substr(i + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = i + 1;
    }
  }
  return lines;
}

}  // namespace

std::string_view baseline_method_name(BaselineMethod method) {
  return method == BaselineMethod::Direct ? "direct" : "cot";
}

std::string_view confidence_level_name(ConfidenceLevel level) {
  switch (level) {
    case ConfidenceLevel::High: return "High";
    case ConfidenceLevel::Medium: return "Medium";
    case ConfidenceLevel::Low: return "Low";
  }
  return "";
}

Assessment parse_direct_classification(const std::string& raw) {
  std::string lowered = to_lower(raw);
  std::string_view leading = trim(lowered);
  if (leading.rfind("phishing", 0) == 0) return Assessment::Phishing;
  if (leading.rfind("legitimate", 0) == 0) return Assessment::Legitimate;
  std::size_t phishing_at = find_ci(lowered, "phishing");
  std::size_t legitimate_at = find_ci(lowered, "legitimate");
  bool has_phishing = phishing_at != std::string::npos;
  bool has_legitimate = legitimate_at != std::string::npos;
  if (has_phishing && has_legitimate) return Assessment::Uncertain;  // conflicting labels
  if (has_phishing) return Assessment::Phishing;
  if (has_legitimate) return Assessment::Legitimate;
  return Assessment::Uncertain;
}

BaselineResult parse_cot_reply(const std::string& raw) {
  BaselineResult result;
  result.method = BaselineMethod::CoT;
  result.raw_reply = raw;

  auto lines = split_lines(raw);
  std::array<std::string, 5> steps;
  std::array<bool, 5> step_seen{};
  std::optional<std::string> classification_text;
  int capture_step = -1;  // index of the step whose body is being collected

  for (std::string_view line : lines) {
    bool matched = false;
    for (int s = 0; s < 5; ++s) {
      std::string label = "STEP " + std::to_string(s + 1);
      if (auto rest = match_line_label(line, label)) {
        steps[s] = std::string(trim(*rest));
        step_seen[s] = true;
        capture_step = s;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (auto rest = match_line_label(line, "CLASSIFICATION")) {
      classification_text = std::string(trim(*rest));
      capture_step = -1;
      continue;
    }
    if (auto rest = match_line_label(line, "CONFIDENCE")) {
      result.confidence_level = parse_confidence_level(*rest);
      capture_step = -1;
      continue;
    }
    if (auto rest = match_line_label(line, "REASONING")) {
      result.reasoning = std::string(trim(*rest));
      capture_step = -1;
      continue;
    }
    if (capture_step >= 0 && !trim(line).empty()) {
      steps[capture_step].push_back('\n');
      steps[capture_step].append(line);
    }
  }

  bool any_step = false;
  for (int s = 0; s < 5; ++s) {
    if (step_seen[s]) {
      any_step = true;
    } else {
      steps[s] = std::string(kMissingStepMarker);
    }
  }
  if (any_step) result.steps = steps;

  if (classification_text) {
    std::string lowered = to_lower(*classification_text);
    std::string_view value = trim(lowered);
    if (value.rfind("phishing", 0) == 0) {
      result.classification = Assessment::Phishing;
    } else if (value.rfind("legitimate", 0) == 0) {
      result.classification = Assessment::Legitimate;
    } else {
      result.classification = Assessment::Uncertain;
    }
  } else {
    result.classification = Assessment::Uncertain;
  }
  return result;
}

BaselineResult run_direct(const ProcessedSample& sample, CompletionBackend& backend,
                          const TokenBudget& budget, const BaselineModel& model,
                          const PromptTemplates& templates) {
  const double started = backend.now_seconds();
  std::string prompt = render_baseline_prompt(templates.direct, sample, budget);
  ModelReply reply = complete_baseline(prompt, backend, model);
  BaselineResult result;
  result.method = BaselineMethod::Direct;
  result.classification = parse_direct_classification(reply.text);
  result.reasoning = reply.text;
  result.raw_reply = reply.text;
  result.prompt = std::move(prompt);
  result.model_name = reply.model_name;
  result.prompt_tokens = reply.prompt_tokens;
  result.completion_tokens = reply.completion_tokens;
  result.wall_time_seconds = backend.now_seconds() - started;
  return result;
}

BaselineResult run_cot(const ProcessedSample& sample, CompletionBackend& backend,
                       const TokenBudget& budget, const BaselineModel& model,
                       const PromptTemplates& templates) {
  const double started = backend.now_seconds();
  std::string prompt = render_baseline_prompt(templates.cot, sample, budget);
  ModelReply reply = complete_baseline(prompt, backend, model);
  BaselineResult result = parse_cot_reply(reply.text);
  result.prompt = std::move(prompt);
  result.model_name = reply.model_name;
  result.prompt_tokens = reply.prompt_tokens;
  result.completion_tokens = reply.completion_tokens;
  result.wall_time_seconds = backend.now_seconds() - started;
  return result;
}

}  // namespace phishdebate
