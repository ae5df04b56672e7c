#pragma once

// Two leftmost-longest, non-overlapping matchers:
//   - SurfaceScanner works on raw text; a match must not touch a letter on
//     either side ("Trump's" matches "Trump", "Trumpian" does not).
//   - match_phrases works on token sequences.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "summswap/text.hpp"
#include "summswap/tokenizer.hpp"

namespace summswap {

struct SurfaceMatch {
  std::size_t form;   // index into the scanner's original form list
  std::size_t begin;  // byte offset
  std::size_t length; // bytes
};

class SurfaceScanner {
 public:
  SurfaceScanner() = default;

  explicit SurfaceScanner(std::vector<std::string> forms, bool case_insensitive = false)
      : forms_(std::move(forms)), case_insensitive_(case_insensitive) {
    order_.reserve(forms_.size());
    for (std::size_t i = 0; i < forms_.size(); ++i)
      if (!forms_[i].empty()) order_.push_back(i);
    // More tokens first, then more bytes, then declaration order.
    std::stable_sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
      const auto ta = text::count_words(forms_[a]);
      const auto tb = text::count_words(forms_[b]);
      if (ta != tb) return ta > tb;
      return forms_[a].size() > forms_[b].size();
    });
  }

  const std::vector<std::string>& forms() const noexcept { return forms_; }

  /// Longest form matching at `pos` with valid boundaries, or npos.
  std::size_t match_at(std::string_view s, std::size_t pos) const {
    if (text::letter_before(s, pos)) return npos;
    for (std::size_t idx : order_) {
      const std::string& f = forms_[idx];
      if (pos + f.size() > s.size()) continue;
      const std::string_view window = s.substr(pos, f.size());
      const bool eq = case_insensitive_ ? text::iequals(window, f) : window == f;
      if (eq && !text::letter_at(s, pos + f.size())) return idx;
    }
    return npos;
  }

  std::vector<SurfaceMatch> scan(std::string_view s) const {
    std::vector<SurfaceMatch> out;
    if (order_.empty()) return out;
    std::size_t pos = 0;
    while (pos < s.size()) {
      const std::size_t idx = match_at(s, pos);
      if (idx != npos) {
        out.push_back({idx, pos, forms_[idx].size()});
        pos += forms_[idx].size();
      } else {
        std::size_t len = 1;
        text::decode_at(s, pos, &len);
        pos += len;
      }
    }
    return out;
  }

  std::size_t count(std::string_view s) const { return scan(s).size(); }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::string> forms_;
  std::vector<std::size_t> order_;
  bool case_insensitive_ = false;
};

struct PhraseMatch {
  std::size_t pattern;
  std::size_t begin;   // token index
  std::size_t length;  // tokens
};

/// Leftmost-longest non-overlapping occurrences of any pattern in `tokens`.
/// Ties in length go to the lower pattern index.
inline std::vector<PhraseMatch> match_phrases(std::span<const std::string> tokens,
                                              const std::vector<std::vector<std::string>>& patterns,
                                              bool case_insensitive = false) {
  std::vector<PhraseMatch> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best = static_cast<std::size_t>(-1), best_len = 0;
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      const auto& pat = patterns[p];
      if (pat.empty() || pat.size() <= best_len || i + pat.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < pat.size() && ok; ++k)
        ok = case_insensitive ? text::iequals(tokens[i + k], pat[k]) : tokens[i + k] == pat[k];
      if (ok) {
        best = p;
        best_len = pat.size();
      }
    }
    if (best_len > 0) {
      out.push_back({best, i, best_len});
      i += best_len;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace summswap
