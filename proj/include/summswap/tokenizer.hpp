#pragma once

// Deterministic rule-based word tokenizer:
//   1. split on whitespace;
//   2. split at dash/ellipsis code points (U+2013, U+2014, U+2026), which
//      become tokens of their own;
//   3. peel leading and trailing punctuation, one token per code point;
//   4. split a final possessive clitic ('s, ’s) off the core.
// Internal hyphens and apostrophes are kept ("covid-19", "don't").

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "summswap/text.hpp"

namespace summswap {

struct TokenSeq {
  std::vector<std::string> tokens;
  std::size_t source_length = 0;  // bytes of the tokenized text

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  std::vector<std::string> lowered() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(text::to_lower(t));
    return out;
  }
};

namespace detail {

inline bool is_punct_cp(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
           (cp >= 0x7B && cp <= 0x7E);
  }
  return cp == 0xA1 || cp == 0xAB || cp == 0xBB || cp == 0xBF || (cp >= 0x2010 && cp <= 0x205E) ||
         (cp >= 0x3000 && cp <= 0x303F);
}

inline bool is_break_cp(char32_t cp) { return cp == 0x2013 || cp == 0x2014 || cp == 0x2026; }

inline void emit_piece(std::string_view piece, std::vector<std::string>& out) {
  std::size_t b = 0, e = piece.size();
  while (b < e) {
    std::size_t len = 0;
    if (!is_punct_cp(text::decode_at(piece, b, &len))) break;
    out.emplace_back(piece.substr(b, len));
    b += len;
  }
  std::vector<std::string> trailing;
  while (e > b) {
    const std::size_t s = text::prev_start(piece, e);
    if (!is_punct_cp(text::decode_at(piece, s))) break;
    trailing.emplace_back(piece.substr(s, e - s));
    e = s;
  }
  std::string_view core = piece.substr(b, e - b);
  std::string_view clitic;
  for (std::string_view suffix : {std::string_view("'s"), std::string_view("'S"),
                                  std::string_view("\xE2\x80\x99s"), std::string_view("\xE2\x80\x99S")}) {
    if (core.size() > suffix.size() && core.substr(core.size() - suffix.size()) == suffix) {
      clitic = core.substr(core.size() - suffix.size());
      core.remove_suffix(suffix.size());
      break;
    }
  }
  if (!core.empty()) out.emplace_back(core);
  if (!clitic.empty()) out.emplace_back(clitic);
  for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) out.push_back(std::move(*it));
}

inline void emit_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t start = 0, pos = 0;
  while (pos < chunk.size()) {
    std::size_t len = 0;
    const char32_t cp = text::decode_at(chunk, pos, &len);
    if (is_break_cp(cp)) {
      if (pos > start) emit_piece(chunk.substr(start, pos - start), out);
      out.emplace_back(chunk.substr(pos, len));
      start = pos + len;
    }
    pos += len;
  }
  if (start < chunk.size()) emit_piece(chunk.substr(start), out);
}

}  // namespace detail

inline TokenSeq tokenize(std::string_view input) {
  TokenSeq seq;
  seq.source_length = input.size();
  std::size_t i = 0;
  while (i < input.size()) {
    while (i < input.size() && text::is_space(input[i])) ++i;
    std::size_t j = i;
    while (j < input.size() && !text::is_space(input[j])) ++j;
    if (j > i) detail::emit_chunk(input.substr(i, j - i), seq.tokens);
    i = j;
  }
  return seq;
}

/// Tokenizes each form; empty forms are dropped.
inline std::vector<std::vector<std::string>> tokenize_forms(const std::vector<std::string>& forms) {
  std::vector<std::vector<std::string>> out;
  for (const auto& f : forms) {
    auto t = tokenize(f).tokens;
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace summswap
