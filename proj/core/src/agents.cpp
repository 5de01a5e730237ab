#include "phishdebate/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace phishdebate {

namespace {

constexpr std::string_view kPeerSectionHeader = "Peer analyses from previous round:";
constexpr std::string_view kReconsideration =
    "Reconsider your own assessment in light of the peer analyses above, then "
    "provide your response in the following format:\n"
    "- Claim: [Your updated assessment]\n"
    "- Confidence: [A score between 0 and 1]\n"
    "- Evidence: [Key patterns supporting your updated claim]";

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view ltrim(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

std::string_view rtrim(std::string_view s) {
  std::size_t end = s.size();
  while (end > 0 && is_space(s[end - 1])) --end;
  return s.substr(0, end);
}

// Matches a "<label>:" line start after optional list markers ('-', '*',
// '+', digits with '.'/')', '#', markdown emphasis). Returns the text after
// the colon when the line carries the label.
std::optional<std::string_view> match_label(std::string_view line, std::string_view label) {
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (is_space(c) || c == '-' || c == '*' || c == '+' || c == '#' || c == '>' ||
        c == '`' || c == '_' || c == '.' || c == ')' ||
        std::isdigit(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    break;
  }
  if (i + label.size() > line.size()) return std::nullopt;
  for (std::size_t k = 0; k < label.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(line[i + k])) !=
        std::tolower(static_cast<unsigned char>(label[k]))) {
      return std::nullopt;
    }
  }
  i += label.size();
  while (i < line.size() && (line[i] == '*' || line[i] == '_' || line[i] == '`' ||
                             is_space(line[i]))) {
    ++i;
  }
  if (i >= line.size() || line[i] != ':') return std::nullopt;
  return line.substr(i + 1);
}

bool is_labeled_line(std::string_view line) {
  return match_label(line, "claim") || match_label(line, "confidence") ||
         match_label(line, "evidence");
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

Claim map_claim_text(std::string_view text) {
  std::string lowered = to_lower(text);
  auto contains = [&lowered](std::string_view needle) {
    return lowered.find(needle) != std::string::npos;
  };
  bool negated_phishing = contains("not phishing") || contains("non-phishing") ||
                          contains("non phishing") || contains("no phishing") ||
                          contains("not malicious") || contains("isn't phishing") ||
                          contains("is not phishing");
  if ((contains("phishing") || contains("malicious")) && !negated_phishing) {
    return Claim::Phishing;
  }
  if (contains("legitimate") || contains("benign") || negated_phishing) {
    return Claim::Legitimate;
  }
  return Claim::Uncertain;
}

std::optional<double> parse_confidence_text(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool starts_number = std::isdigit(static_cast<unsigned char>(c)) ||
                         (c == '.' && i + 1 < text.size() &&
                          std::isdigit(static_cast<unsigned char>(text[i + 1])));
    if (!starts_number) continue;
    std::string token(text.substr(i));
    char* end = nullptr;
    double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str()) return std::nullopt;
    if (value >= 0.0 && value <= 1.0) return value;
    if (value > 1.0 && value <= 100.0) return value / 100.0;  // percentage reply
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::string_view agent_display_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::UrlAnalyst: return "URL Analyst";
    case AgentKind::HtmlStructure: return "HTML Structure";
    case AgentKind::ContentSemantic: return "Content Semantic";
    case AgentKind::BrandImpersonation: return "Brand Impersonation";
  }
  return "";
}

std::string_view agent_id(AgentKind kind) {
  switch (kind) {
    case AgentKind::UrlAnalyst: return "url_analyst";
    case AgentKind::HtmlStructure: return "html_structure";
    case AgentKind::ContentSemantic: return "content_semantic";
    case AgentKind::BrandImpersonation: return "brand_impersonation";
  }
  return "";
}

std::string_view agent_flag_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::UrlAnalyst: return "url";
    case AgentKind::HtmlStructure: return "html";
    case AgentKind::ContentSemantic: return "content";
    case AgentKind::BrandImpersonation: return "brand";
  }
  return "";
}

std::optional<AgentKind> agent_from_flag_name(std::string_view name) {
  std::string lowered = to_lower(name);
  for (AgentKind kind : kAllAgents) {
    if (lowered == agent_flag_name(kind)) return kind;
  }
  return std::nullopt;
}

std::optional<AgentKind> agent_from_id(std::string_view id) {
  for (AgentKind kind : kAllAgents) {
    if (id == agent_id(kind)) return kind;
  }
  return std::nullopt;
}

std::string_view claim_name(Claim claim) {
  switch (claim) {
    case Claim::Phishing: return "PHISHING";
    case Claim::Legitimate: return "LEGITIMATE";
    case Claim::Uncertain: return "UNCERTAIN";
  }
  return "";
}

std::string render_initial_prompt(AgentKind agent, const ProcessedSample& sample,
                                  const TokenBudget& budget,
                                  const PromptTemplates& templates) {
  switch (agent) {
    case AgentKind::UrlAnalyst:
      return substitute_placeholder(templates.url_analyst, "[TARGET_URL]", sample.url);
    case AgentKind::HtmlStructure: {
      auto html = truncate_html(sample.cleaned_html, budget);
      return substitute_placeholder(templates.html_structure, "[TRUNCATED_HTML_CONTENT]",
                                    html.content);
    }
    case AgentKind::ContentSemantic: {
      auto text = truncate_text(sample.visible_text, budget);
      return substitute_placeholder(templates.content_semantic,
                                    "[TRUNCATED_VISIBLE_TEXT]", text.content);
    }
    case AgentKind::BrandImpersonation: {
      auto text = truncate_text(sample.visible_text, budget);
      std::string prompt =
          substitute_placeholder(templates.brand_impersonation, "[TARGET_URL]", sample.url);
      return substitute_placeholder(std::move(prompt), "[TRUNCATED_VISIBLE_TEXT]",
                                    text.content);
    }
  }
  return {};
}

std::string render_debate_prompt(AgentKind agent, const ProcessedSample& sample,
                                 const std::string& peer_context,
                                 const TokenBudget& budget,
                                 const PromptTemplates& templates) {
  if (ltrim(peer_context).empty()) {
    throw std::invalid_argument("debate prompt requires at least one peer entry");
  }
  std::string prompt = render_initial_prompt(agent, sample, budget, templates);
  if (prompt.empty() || prompt.back() != '\n') prompt.push_back('\n');
  prompt.push_back('\n');
  prompt.append(kPeerSectionHeader);
  prompt.append("\n\n");
  prompt.append(rtrim(peer_context));
  prompt.append("\n\n");
  prompt.append(kReconsideration);
  prompt.push_back('\n');
  return prompt;
}

AgentResponse parse_agent_response(const std::string& raw, AgentKind agent, int round) {
  AgentResponse response;
  response.agent = agent;
  response.round = round;
  response.raw_reply = raw;

  auto lines = split_lines(raw);
  std::optional<std::size_t> claim_line;
  std::optional<std::size_t> confidence_line;
  std::optional<std::size_t> evidence_line;
  std::string_view claim_text, confidence_text, evidence_head;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!claim_line) {
      if (auto rest = match_label(lines[i], "claim")) {
        claim_line = i;
        claim_text = *rest;
        continue;
      }
    }
    if (!confidence_line) {
      if (auto rest = match_label(lines[i], "confidence")) {
        confidence_line = i;
        confidence_text = *rest;
        continue;
      }
    }
    if (!evidence_line) {
      if (auto rest = match_label(lines[i], "evidence")) {
        evidence_line = i;
        evidence_head = *rest;
        continue;
      }
    }
  }
  if (!claim_line) {
    throw AgentParseError("agent reply has no Claim line", raw);
  }
  response.claim = map_claim_text(claim_text);
  if (confidence_line) {
    response.confidence = parse_confidence_text(confidence_text);
  }
  if (evidence_line) {
    // Markdown emphasis that closes after the colon ("**Evidence:** x")
    // leaves stray markers at the head of the value.
    std::string_view head = ltrim(evidence_head);
    while (!head.empty() && (head.front() == '*' || head.front() == '_' ||
                             head.front() == '`')) {
      head.remove_prefix(1);
    }
    std::string evidence(ltrim(head));
    for (std::size_t i = *evidence_line + 1; i < lines.size(); ++i) {
      if (is_labeled_line(lines[i])) break;
      evidence.push_back('\n');
      evidence.append(lines[i]);
    }
    response.evidence = std::string(rtrim(evidence));
  }
  return response;
}

std::string format_confidence(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  std::string text(buffer);
  while (!text.empty() && text.back() == '0') text.pop_back();
  if (!text.empty() && text.back() == '.') text.pop_back();
  return text;
}

std::string format_agent_response(const AgentResponse& response) {
  std::string out;
  out.append("- Claim: ");
  out.append(claim_name(response.claim));
  out.append("\n- Confidence: ");
  out.append(response.confidence ? format_confidence(*response.confidence) : "n/a");
  out.append("\n- Evidence: ");
  out.append(response.evidence);
  return out;
}

}  // namespace phishdebate
