#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace phishdebate {

/// Marker appended to any content that was cut to fit a token budget.
/// The exact bytes are part of the transcript format; tests pin them.
inline constexpr std::string_view kTruncationNotice =
    "[NOTE: content truncated due to length limits]";

/// Per-model token limits for the two content channels plus the
/// character-ratio estimation factor used instead of a real tokenizer.
struct TokenBudget {
  std::string model_id = "default";
  std::size_t html_token_limit = 8000;
  std::size_t text_token_limit = 4000;
  double chars_per_token = 4.0;
};

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws if limits are below 64 tokens or the ratio is non-positive.
void validate_budget(const TokenBudget& budget);

/// ceil(length / chars_per_token). Monotone in input length.
std::size_t estimate_tokens(std::string_view text, const TokenBudget& budget);

struct TruncationResult {
  std::string content;
  bool was_truncated = false;
};

/// Cuts HTML at the last complete tag-close '>' that fits the html token
/// limit with room for the notice, then appends the notice directly after
/// the cut. Content that already fits is returned unchanged.
///
/// Throws TruncationError when the limit cannot hold the notice or when no
/// '>' occurs inside the admissible prefix.
TruncationResult truncate_html(std::string_view html, const TokenBudget& budget);

/// Same contract for plain text, cutting at the last whitespace character
/// inside the text token limit (the whitespace stays in the output, the
/// notice follows it).
TruncationResult truncate_text(std::string_view text, const TokenBudget& budget);

}  // namespace phishdebate
