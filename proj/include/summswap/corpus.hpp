#pragma once

// Article corpora: JSONL ingestion, entity-mention filtering, year and topic
// subsets, and per-month counts.

#include <chrono>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "summswap/error.hpp"
#include "summswap/matching.hpp"
#include "summswap/text.hpp"
#include "summswap/tokenizer.hpp"

namespace summswap {

inline constexpr std::string_view kCorpusModule = "corpus";

/// Parses a strict "YYYY-MM-DD" calendar date.
inline std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t b, std::size_t n) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = b; i < b + n; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  const auto y = digits(0, 4), m = digits(5, 2), d = digits(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

inline std::string format_iso_date(const std::chrono::year_month_day& ymd) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

struct Article {
  std::string id;
  std::chrono::year_month_day date{};
  std::string text;
  std::size_t word_count = 0;

  int year() const { return static_cast<int>(date.year()); }
  unsigned month() const { return static_cast<unsigned>(date.month()); }

  static Article make(std::string id, std::chrono::year_month_day date, std::string text) {
    Article a{std::move(id), date, std::move(text), 0};
    a.word_count = text::count_words(a.text);
    return a;
  }

  bool operator==(const Article&) const = default;
};

struct CorpusGroup {
  std::string label;
  std::vector<Article> articles;

  std::size_t size() const noexcept { return articles.size(); }
  bool empty() const noexcept { return articles.empty(); }
};

struct MentionFilter {
  std::vector<std::string> include_forms;
  std::vector<std::string> exclude_forms;
  std::optional<std::size_t> max_words;
  std::size_t min_mentions = 1;

  void validate() const {
    if (include_forms.empty()) throw Error(ErrorKind::InvalidFilter, kCorpusModule, "include_forms is empty");
    if (max_words && *max_words < 1) throw Error(ErrorKind::InvalidFilter, kCorpusModule, "max_words must be >= 1");
  }
};

enum class CorpusFormat { Jsonl };

inline CorpusFormat parse_corpus_format(std::string_view id) {
  if (id == "jsonl") return CorpusFormat::Jsonl;
  throw Error(ErrorKind::ParseError, kCorpusModule, "unknown corpus format '" + std::string(id) + "'");
}

/// Parses JSONL content. Any bad record aborts with its line number.
inline CorpusGroup parse_corpus_jsonl(std::string_view content, std::string label = {}) {
  CorpusGroup group{std::move(label), {}};
  std::set<std::string> seen;
  const auto lines = text::split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1);
    if (text::trim(lines[i]).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::ParseError, kCorpusModule, where + ": " + e.what());
    }
    if (!rec.is_object()) throw Error(ErrorKind::ParseError, kCorpusModule, where + ": record is not an object");
    for (const char* field : {"id", "date", "text"}) {
      if (!rec.contains(field) || !rec[field].is_string())
        throw Error(ErrorKind::MissingField, kCorpusModule, where + ": missing string field '" + field + "'");
    }
    std::string id = rec["id"].get<std::string>();
    if (id.empty()) throw Error(ErrorKind::MissingField, kCorpusModule, where + ": empty id");
    const std::string date_str = rec["date"].get<std::string>();
    const auto date = parse_iso_date(date_str);
    if (!date)
      throw Error(ErrorKind::MalformedDate, kCorpusModule, where + ": article '" + id + "' has date '" + date_str + "'");
    if (!seen.insert(id).second)
      throw Error(ErrorKind::DuplicateId, kCorpusModule, where + ": duplicate id '" + id + "'");
    group.articles.push_back(Article::make(std::move(id), *date, rec["text"].get<std::string>()));
  }
  return group;
}

inline CorpusGroup ingest_corpus(const std::string& path, CorpusFormat format = CorpusFormat::Jsonl) {
  const std::string content = text::read_file(path, kCorpusModule);
  switch (format) {
    case CorpusFormat::Jsonl: return parse_corpus_jsonl(content, path);
  }
  return {};
}

inline std::string serialize_corpus_jsonl(const CorpusGroup& group) {
  std::string out;
  for (const auto& a : group.articles) {
    nlohmann::ordered_json rec;
    rec["id"] = a.id;
    rec["date"] = format_iso_date(a.date);
    rec["text"] = a.text;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

/// Keeps articles with >= min_mentions include-form occurrences, no
/// exclude-form occurrence, and at most max_words words. Matching is
/// case-sensitive on letter boundaries.
inline CorpusGroup filter_by_mentions(const CorpusGroup& group, const MentionFilter& filter) {
  filter.validate();
  const SurfaceScanner include(filter.include_forms);
  const SurfaceScanner exclude(filter.exclude_forms);
  CorpusGroup out{group.label, {}};
  for (const auto& a : group.articles) {
    if (filter.max_words && a.word_count > *filter.max_words) continue;
    if (include.count(a.text) < filter.min_mentions) continue;
    if (!filter.exclude_forms.empty() && exclude.count(a.text) > 0) continue;
    out.articles.push_back(a);
  }
  return out;
}

inline CorpusGroup split_by_year(const CorpusGroup& group, int year) {
  CorpusGroup out{group.label + "@" + std::to_string(year), {}};
  for (const auto& a : group.articles)
    if (a.year() == year) out.articles.push_back(a);
  return out;
}

/// Case-insensitive whole-token topic filter. Multi-word keywords match as
/// token sequences.
inline CorpusGroup filter_by_keywords(const CorpusGroup& group, const std::vector<std::string>& keywords) {
  if (keywords.empty()) throw Error(ErrorKind::InvalidFilter, kCorpusModule, "keyword list is empty");
  const auto patterns = tokenize_forms(keywords);
  CorpusGroup out{group.label, {}};
  for (const auto& a : group.articles) {
    const auto tokens = tokenize(a.text);
    if (!match_phrases(tokens.tokens, patterns, /*case_insensitive=*/true).empty()) out.articles.push_back(a);
  }
  return out;
}

using MonthKey = std::pair<int, unsigned>;

inline std::map<MonthKey, std::size_t> monthly_counts(const CorpusGroup& group) {
  std::map<MonthKey, std::size_t> counts;
  for (const auto& a : group.articles) ++counts[{a.year(), a.month()}];
  return counts;
}

}  // namespace summswap
