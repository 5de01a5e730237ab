#pragma once

#include <string>
#include <string_view>

namespace phishdebate {

/// Removes every `style`, `noscript` and `script` element (tag plus
/// contents) and every `link` tag whose rel attribute lists `stylesheet`.
/// Parsing is lenient: malformed markup never fails and fragments the
/// scanner cannot interpret pass through untouched. Total function and
/// idempotent: clean_html(clean_html(x)) == clean_html(x).
std::string clean_html(std::string_view raw_html);

/// Concatenates the text nodes of already-cleaned HTML in document order,
/// collapsing whitespace runs to single spaces and trimming the ends.
/// Character entities are kept verbatim; comments and tag markup are not
/// text nodes.
std::string extract_visible_text(std::string_view cleaned_html);

}  // namespace phishdebate
