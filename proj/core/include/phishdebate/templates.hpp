#pragma once

#include <filesystem>
#include <string>

namespace phishdebate {

/// Prompt template set. Placeholders: [TARGET_URL], [TRUNCATED_HTML_CONTENT],
/// [TRUNCATED_VISIBLE_TEXT] in the per-role templates, [ROUND_NUMBER] and
/// [AGENT_ANALYSES] in the moderator template, [DEBATE_HISTORY] in the judge
/// template.
struct PromptTemplates {
  std::string url_analyst;
  std::string html_structure;
  std::string content_semantic;
  std::string brand_impersonation;
  std::string moderator;
  std::string judge;
  std::string direct;
  std::string cot;
};

/// The canonical templates compiled into the library. Identical bytes to
/// the files under templates/ in the source tree.
const PromptTemplates& default_templates();

/// Loads overrides from a directory holding any of url_analyst.txt,
/// html_structure.txt, content_semantic.txt, brand_impersonation.txt,
/// moderator.txt, judge.txt, direct.txt, cot.txt. Missing files keep the
/// built-in text.
PromptTemplates load_templates(const std::filesystem::path& dir);

/// Replaces every occurrence of `placeholder` in `text`.
std::string substitute_placeholder(std::string text, std::string_view placeholder,
                                   std::string_view value);

}  // namespace phishdebate
