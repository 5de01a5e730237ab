#include "phishdebate/html.hpp"

#include <array>
#include <cctype>
#include <string>

namespace phishdebate {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(lower(c));
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

// Elements whose entire subtree is dropped. script and style are raw-text
// elements, so their content runs to the first matching close tag.
constexpr std::array<std::string_view, 3> kRemovedContainers = {"script", "style",
                                                                "noscript"};

bool is_removed_container(std::string_view name) {
  for (auto candidate : kRemovedContainers) {
    if (iequals(name, candidate)) return true;
  }
  return false;
}

struct OpenTag {
  std::string name;       // lowercased
  std::string rel_value;  // lowercased value of the rel attribute, if any
  bool self_closing = false;
  std::size_t end = 0;  // index one past the closing '>' (or input end)
  bool terminated = false;  // false when the tag never closes before EOF
};

// Parses one open tag starting at `pos` (input[pos] == '<', next char is a
// letter). Attribute values are quote-aware so '>' inside quotes does not
// end the tag.
OpenTag parse_open_tag(std::string_view input, std::size_t pos) {
  OpenTag tag;
  std::size_t i = pos + 1;
  std::size_t name_start = i;
  while (i < input.size() &&
         (std::isalnum(static_cast<unsigned char>(input[i])) || input[i] == '-' ||
          input[i] == ':')) {
    ++i;
  }
  tag.name = to_lower(input.substr(name_start, i - name_start));
  while (i < input.size()) {
    if (input[i] == '>') {
      tag.end = i + 1;
      tag.terminated = true;
      return tag;
    }
    if (input[i] == '/' && i + 1 < input.size() && input[i + 1] == '>') {
      tag.self_closing = true;
      tag.end = i + 2;
      tag.terminated = true;
      return tag;
    }
    if (is_space(input[i]) || input[i] == '/') {
      ++i;
      continue;
    }
    // Attribute name.
    std::size_t attr_start = i;
    while (i < input.size() && !is_space(input[i]) && input[i] != '=' &&
           input[i] != '>' && input[i] != '/') {
      ++i;
    }
    std::string attr_name = to_lower(input.substr(attr_start, i - attr_start));
    while (i < input.size() && is_space(input[i])) ++i;
    std::string attr_value;
    if (i < input.size() && input[i] == '=') {
      ++i;
      while (i < input.size() && is_space(input[i])) ++i;
      if (i < input.size() && (input[i] == '"' || input[i] == '\'')) {
        char quote = input[i++];
        std::size_t value_start = i;
        while (i < input.size() && input[i] != quote) ++i;
        attr_value = std::string(input.substr(value_start, i - value_start));
        if (i < input.size()) ++i;  // consume closing quote
      } else {
        std::size_t value_start = i;
        while (i < input.size() && !is_space(input[i]) && input[i] != '>') ++i;
        attr_value = std::string(input.substr(value_start, i - value_start));
      }
    }
    if (attr_name == "rel") tag.rel_value = to_lower(attr_value);
  }
  tag.end = input.size();
  tag.terminated = false;
  return tag;
}

// True when a whitespace-separated token of `rel` equals "stylesheet".
bool rel_lists_stylesheet(std::string_view rel) {
  std::size_t i = 0;
  while (i < rel.size()) {
    while (i < rel.size() && is_space(rel[i])) ++i;
    std::size_t start = i;
    while (i < rel.size() && !is_space(rel[i])) ++i;
    if (iequals(rel.substr(start, i - start), "stylesheet")) return true;
  }
  return false;
}

// Finds the end (one past '>') of the first </name ...> after `from`,
// case-insensitively. npos when the element never closes.
std::size_t find_close_tag_end(std::string_view input, std::size_t from,
                               std::string_view name) {
  std::size_t i = from;
  for (;;) {
    i = input.find('<', i);
    if (i == std::string_view::npos || i + 1 >= input.size()) return std::string_view::npos;
    if (input[i + 1] != '/') {
      ++i;
      continue;
    }
    std::size_t j = i + 2;
    std::size_t name_start = j;
    while (j < input.size() &&
           (std::isalnum(static_cast<unsigned char>(input[j])) || input[j] == '-' ||
            input[j] == ':')) {
      ++j;
    }
    if (!iequals(input.substr(name_start, j - name_start), name)) {
      ++i;
      continue;
    }
    std::size_t gt = input.find('>', j);
    if (gt == std::string_view::npos) return input.size();
    return gt + 1;
  }
}

// One removal pass. clean_html iterates this to a fixpoint so removals can
// never splice together a new removable tag.
std::string clean_pass(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  std::size_t i = 0;
  while (i < input.size()) {
    char c = input[i];
    if (c != '<') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (i + 1 >= input.size()) {
      out.push_back(c);
      ++i;
      continue;
    }
    char next = input[i + 1];
    if (next == '!' || next == '?') {
      // Comment, doctype or processing instruction: copied verbatim.
      std::size_t end;
      if (input.compare(i, 4, "<!--") == 0) {
        end = input.find("-->", i + 4);
        end = end == std::string_view::npos ? input.size() : end + 3;
      } else {
        end = input.find('>', i + 1);
        end = end == std::string_view::npos ? input.size() : end + 1;
      }
      out.append(input.substr(i, end - i));
      i = end;
      continue;
    }
    if (next == '/') {
      // Close tag (including strays left by malformed markup): copied.
      std::size_t end = input.find('>', i + 1);
      end = end == std::string_view::npos ? input.size() : end + 1;
      out.append(input.substr(i, end - i));
      i = end;
      continue;
    }
    if (!is_alpha(next)) {
      out.push_back(c);
      ++i;
      continue;
    }
    OpenTag tag = parse_open_tag(input, i);
    if (!tag.terminated) {
      // Unfinished tag at EOF: unparseable fragment, passes through.
      out.append(input.substr(i));
      break;
    }
    if (is_removed_container(tag.name)) {
      if (tag.self_closing) {
        i = tag.end;
        continue;
      }
      std::size_t close_end = find_close_tag_end(input, tag.end, tag.name);
      i = close_end == std::string_view::npos ? input.size() : close_end;
      continue;
    }
    if (tag.name == "link" && rel_lists_stylesheet(tag.rel_value)) {
      i = tag.end;
      continue;
    }
    out.append(input.substr(i, tag.end - i));
    i = tag.end;
  }
  return out;
}

}  // namespace

std::string clean_html(std::string_view raw_html) {
  std::string current(raw_html);
  for (;;) {
    std::string next = clean_pass(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::string extract_visible_text(std::string_view cleaned_html) {
  std::string joined;
  joined.reserve(cleaned_html.size());
  std::size_t i = 0;
  auto flush_node = [&joined](std::string_view node) {
    if (node.empty()) return;
    joined.append(node);
    joined.push_back(' ');  // node separator, collapsed below
  };
  std::size_t text_start = 0;
  while (i < cleaned_html.size()) {
    if (cleaned_html[i] != '<') {
      ++i;
      continue;
    }
    char next = i + 1 < cleaned_html.size() ? cleaned_html[i + 1] : '\0';
    bool is_markup = next == '!' || next == '?' || next == '/' || is_alpha(next);
    if (!is_markup) {
      ++i;
      continue;
    }
    flush_node(cleaned_html.substr(text_start, i - text_start));
    std::size_t end;
    if (cleaned_html.compare(i, 4, "<!--") == 0) {
      end = cleaned_html.find("-->", i + 4);
      end = end == std::string_view::npos ? cleaned_html.size() : end + 3;
    } else if (next == '!' || next == '?' || next == '/') {
      end = cleaned_html.find('>', i + 1);
      end = end == std::string_view::npos ? cleaned_html.size() : end + 1;
    } else {
      OpenTag tag = parse_open_tag(cleaned_html, i);
      end = tag.terminated ? tag.end : cleaned_html.size();
    }
    i = end;
    text_start = end;
  }
  flush_node(cleaned_html.substr(text_start));

  // Whitespace normalization: collapse runs, trim ends.
  std::string out;
  out.reserve(joined.size());
  bool pending_space = false;
  for (char c : joined) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace phishdebate
