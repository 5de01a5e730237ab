#include "phishdebate/truncation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace phishdebate {

namespace {

std::size_t estimate_length(std::size_t length, double chars_per_token) {
  if (length == 0) return 0;
  double est = std::ceil(static_cast<double>(length) / chars_per_token);
  if (est < 0.0) return 0;
  return static_cast<std::size_t>(est);
}

// Largest prefix length whose token estimate stays within `limit`.
// estimate_length is monotone in length, so binary search applies.
std::size_t max_length_within(std::size_t total, std::size_t limit,
                              double chars_per_token) {
  if (estimate_length(total, chars_per_token) <= limit) return total;
  std::size_t lo = 0, hi = total;  // invariant: est(lo) <= limit < est(hi)
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (estimate_length(mid, chars_per_token) <= limit) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

void validate_budget(const TokenBudget& budget) {
  if (budget.chars_per_token <= 0.0) {
    throw TruncationError("chars_per_token must be positive");
  }
  if (budget.html_token_limit < 64 || budget.text_token_limit < 64) {
    throw TruncationError("token limits must be at least 64");
  }
}

std::size_t estimate_tokens(std::string_view text, const TokenBudget& budget) {
  return estimate_length(text.size(), budget.chars_per_token);
}

TruncationResult truncate_html(std::string_view html, const TokenBudget& budget) {
  const std::size_t limit = budget.html_token_limit;
  if (estimate_tokens(html, budget) <= limit) {
    return {std::string(html), false};
  }
  const std::size_t notice_cost =
      estimate_length(kTruncationNotice.size(), budget.chars_per_token);
  if (notice_cost > limit) {
    throw TruncationError("token limit too small for the truncation notice");
  }
  std::size_t max_len =
      max_length_within(html.size(), limit - notice_cost, budget.chars_per_token);
  // Cut at the last complete tag inside the admissible prefix. The extra
  // whole-output check guards the ceil arithmetic at the boundary.
  std::size_t cut = max_len == 0 ? std::string_view::npos
                                 : html.rfind('>', max_len - 1);
  while (cut != std::string_view::npos &&
         estimate_length(cut + 1 + kTruncationNotice.size(),
                         budget.chars_per_token) > limit) {
    cut = cut == 0 ? std::string_view::npos : html.rfind('>', cut - 1);
  }
  if (cut == std::string_view::npos) {
    throw TruncationError("no tag boundary '>' inside the token budget");
  }
  std::string out(html.substr(0, cut + 1));
  out.append(kTruncationNotice);
  return {std::move(out), true};
}

TruncationResult truncate_text(std::string_view text, const TokenBudget& budget) {
  const std::size_t limit = budget.text_token_limit;
  if (estimate_tokens(text, budget) <= limit) {
    return {std::string(text), false};
  }
  const std::size_t notice_cost =
      estimate_length(kTruncationNotice.size(), budget.chars_per_token);
  if (notice_cost > limit) {
    throw TruncationError("token limit too small for the truncation notice");
  }
  std::size_t max_len =
      max_length_within(text.size(), limit - notice_cost, budget.chars_per_token);
  std::size_t cut = std::string_view::npos;
  for (std::size_t i = max_len; i-- > 0;) {
    if (is_space(text[i])) {
      cut = i;
      break;
    }
  }
  while (cut != std::string_view::npos &&
         estimate_length(cut + 1 + kTruncationNotice.size(),
                         budget.chars_per_token) > limit) {
    std::size_t next = std::string_view::npos;
    for (std::size_t i = cut; i-- > 0;) {
      if (is_space(text[i])) {
        next = i;
        break;
      }
    }
    cut = next;
  }
  if (cut == std::string_view::npos) {
    throw TruncationError("no whitespace boundary inside the token budget");
  }
  std::string out(text.substr(0, cut + 1));
  out.append(kTruncationNotice);
  return {std::move(out), true};
}

}  // namespace phishdebate
