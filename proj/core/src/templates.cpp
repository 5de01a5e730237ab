#include "phishdebate/templates.hpp"

#include <fstream>
#include <sstream>

namespace phishdebate {

namespace {

#include "builtin_templates.inc"  // generated from templates/ at build time

bool load_if_present(const std::filesystem::path& file, std::string& target) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  target = buffer.str();
  return true;
}

}  // namespace

const PromptTemplates& default_templates() {
  static const PromptTemplates templates = [] {
    PromptTemplates t;
    t.url_analyst = kBuiltinUrlAnalyst;
    t.html_structure = kBuiltinHtmlStructure;
    t.content_semantic = kBuiltinContentSemantic;
    t.brand_impersonation = kBuiltinBrandImpersonation;
    t.moderator = kBuiltinModerator;
    t.judge = kBuiltinJudge;
    t.direct = kBuiltinDirect;
    t.cot = kBuiltinCot;
    return t;
  }();
  return templates;
}

PromptTemplates load_templates(const std::filesystem::path& dir) {
  PromptTemplates t = default_templates();
  load_if_present(dir / "url_analyst.txt", t.url_analyst);
  load_if_present(dir / "html_structure.txt", t.html_structure);
  load_if_present(dir / "content_semantic.txt", t.content_semantic);
  load_if_present(dir / "brand_impersonation.txt", t.brand_impersonation);
  load_if_present(dir / "moderator.txt", t.moderator);
  load_if_present(dir / "judge.txt", t.judge);
  load_if_present(dir / "direct.txt", t.direct);
  load_if_present(dir / "cot.txt", t.cot);
  return t;
}

std::string substitute_placeholder(std::string text, std::string_view placeholder,
                                   std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace phishdebate
