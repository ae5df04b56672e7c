#pragma once

// Per-summary feature functions. Every count is reported raw and normalized by
// summary token length; a zero-length summary normalizes to 0.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "summswap/error.hpp"
#include "summswap/matching.hpp"
#include "summswap/text.hpp"
#include "summswap/tokenizer.hpp"

namespace summswap {

inline constexpr std::string_view kFeaturesModule = "features";

struct FeatureValue {
  std::string feature_name;
  double raw_count = 0.0;
  double normalized = 0.0;
};

inline FeatureValue make_feature(std::string name, double raw, std::size_t token_length) {
  const double norm = token_length == 0 ? 0.0 : raw / static_cast<double>(token_length);
  return {std::move(name), raw, norm};
}

// ---------------------------------------------------------------------------
// Entity names, party names, phrases

inline FeatureValue count_entity_mentions(const TokenSeq& tokens, const std::vector<std::string>& forms,
                                          bool case_insensitive = false) {
  const auto n = match_phrases(tokens.tokens, tokenize_forms(forms), case_insensitive).size();
  return make_feature("entity_mentions", static_cast<double>(n), tokens.size());
}

enum class PartySide { Dem, Rep };

inline const std::vector<std::string>& party_terms(PartySide side) {
  static const std::vector<std::string> dem{"Democrat", "Democrats", "Democratic"};
  static const std::vector<std::string> rep{"Republican", "Republicans", "GOP"};
  return side == PartySide::Dem ? dem : rep;
}

inline FeatureValue count_party_names(const TokenSeq& tokens, PartySide side, bool case_insensitive = false) {
  const auto& terms = party_terms(side);
  std::size_t n = 0;
  for (const auto& t : tokens.tokens)
    for (const auto& term : terms)
      if (case_insensitive ? text::iequals(t, term) : t == term) {
        ++n;
        break;
      }
  return make_feature(side == PartySide::Dem ? "party_DEM" : "party_REP", static_cast<double>(n), tokens.size());
}

/// Case-insensitive whole-token-sequence count.
inline FeatureValue count_phrase(const TokenSeq& tokens, const std::string& phrase) {
  auto pattern = tokenize(phrase).tokens;
  if (pattern.empty()) throw Error(ErrorKind::InvalidFilter, kFeaturesModule, "empty phrase");
  const auto n = match_phrases(tokens.tokens, {pattern}, /*case_insensitive=*/true).size();
  return make_feature("phrase:" + phrase, static_cast<double>(n), tokens.size());
}

// ---------------------------------------------------------------------------
// Roster of politicians

enum class Gender { Male, Female };
enum class Party { Democrat, Republican, Independent };
using RosterAttribute = std::variant<Gender, Party>;

inline std::string_view to_string(Gender g) { return g == Gender::Male ? "male" : "female"; }
inline std::string_view to_string(Party p) {
  switch (p) {
    case Party::Democrat: return "democrat";
    case Party::Republican: return "republican";
    case Party::Independent: return "independent";
  }
  return "";
}
inline std::string attribute_name(const RosterAttribute& a) {
  return std::visit([](auto v) { return std::string(to_string(v)); }, a);
}

struct RosterEntry {
  std::string full_name;
  std::string last_name;
  Gender gender = Gender::Male;
  Party party = Party::Independent;

  bool has(const RosterAttribute& a) const {
    if (const auto* g = std::get_if<Gender>(&a)) return gender == *g;
    return party == std::get<Party>(a);
  }
};

struct Roster {
  std::vector<RosterEntry> entries;
};

/// JSON array of {"name","last_name","gender","party"}.
inline Roster parse_roster_json(std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidRoster, kFeaturesModule, e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::InvalidRoster, kFeaturesModule, "roster must be a JSON array");
  Roster roster;
  std::set<std::string> names;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const std::string where = "entry " + std::to_string(i);
    for (const char* f : {"name", "last_name", "gender", "party"})
      if (!e.is_object() || !e.contains(f) || !e[f].is_string())
        throw Error(ErrorKind::InvalidRoster, kFeaturesModule, where + ": missing string field '" + f + "'");
    RosterEntry r;
    r.full_name = e["name"].get<std::string>();
    r.last_name = e["last_name"].get<std::string>();
    const auto gender = text::to_lower(e["gender"].get<std::string>());
    const auto party = text::to_lower(e["party"].get<std::string>());
    if (gender == "male") r.gender = Gender::Male;
    else if (gender == "female") r.gender = Gender::Female;
    else throw Error(ErrorKind::InvalidRoster, kFeaturesModule, where + ": gender '" + gender + "'");
    if (party == "democrat") r.party = Party::Democrat;
    else if (party == "republican") r.party = Party::Republican;
    else if (party == "independent") r.party = Party::Independent;
    else throw Error(ErrorKind::InvalidRoster, kFeaturesModule, where + ": party '" + party + "'");
    if (r.full_name.empty() || !names.insert(r.full_name).second)
      throw Error(ErrorKind::InvalidRoster, kFeaturesModule, where + ": empty or duplicate name '" + r.full_name + "'");
    roster.entries.push_back(std::move(r));
  }
  return roster;
}

inline Roster load_roster(const std::string& path) { return parse_roster_json(text::read_file(path, kFeaturesModule)); }

enum class RosterMatchMode { FullName, LastName };

/// Precompiled roster patterns with the audited entities removed. An entry is
/// excluded when its full name is one of `excluded_names` or its last name
/// equals the final token of one of them.
class RosterMatcher {
 public:
  RosterMatcher(const Roster& roster, const std::vector<std::string>& excluded_names,
                RosterMatchMode mode = RosterMatchMode::FullName) {
    std::set<std::string> excluded_full(excluded_names.begin(), excluded_names.end());
    std::set<std::string> excluded_last;
    for (const auto& n : excluded_names) {
      const auto t = tokenize(n).tokens;
      if (!t.empty()) excluded_last.insert(t.back());
    }
    for (const auto& e : roster.entries) {
      if (excluded_full.count(e.full_name) || excluded_last.count(e.last_name)) continue;
      auto pat = tokenize(mode == RosterMatchMode::FullName ? e.full_name : e.last_name).tokens;
      if (pat.empty()) continue;
      entries_.push_back(e);
      patterns_.push_back(std::move(pat));
    }
  }

  /// Matched roster entries, one per occurrence.
  std::vector<const RosterEntry*> mentions(const TokenSeq& tokens) const {
    std::vector<const RosterEntry*> out;
    for (const auto& m : match_phrases(tokens.tokens, patterns_)) out.push_back(&entries_[m.pattern]);
    return out;
  }

 private:
  std::vector<RosterEntry> entries_;
  std::vector<std::vector<std::string>> patterns_;
};

inline FeatureValue count_roster_attribute(const TokenSeq& tokens, const RosterMatcher& matcher,
                                           const RosterAttribute& attribute) {
  std::size_t n = 0;
  for (const auto* e : matcher.mentions(tokens))
    if (e->has(attribute)) ++n;
  return make_feature("roster_" + attribute_name(attribute), static_cast<double>(n), tokens.size());
}

inline FeatureValue count_roster_attribute(const TokenSeq& tokens, const Roster& roster,
                                           const RosterAttribute& attribute,
                                           const std::vector<std::string>& excluded_names = {},
                                           RosterMatchMode mode = RosterMatchMode::FullName) {
  return count_roster_attribute(tokens, RosterMatcher(roster, excluded_names, mode), attribute);
}

// ---------------------------------------------------------------------------
// Lexicons

enum class LexiconKind { WordList, RegexList, WildcardDict };

struct Lexicon {
  std::string name;
  LexiconKind kind = LexiconKind::WordList;
  std::vector<std::string> entries;
  std::optional<std::string> category;

  // WordList: tokenized lowercase entries. RegexList: compiled patterns.
  std::vector<std::vector<std::string>> phrases;
  std::vector<std::regex> regexes;
};

namespace detail {

/// Non-empty, non-comment lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> content_lines(std::string_view content) {
  std::vector<std::pair<std::size_t, std::string>> out;
  const auto lines = text::split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto t = text::trim(lines[i]);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(i + 1, std::string(t));
  }
  return out;
}

}  // namespace detail

/// One lowercase word (or short phrase) per line; '#' starts a comment line.
inline Lexicon parse_word_list(std::string name, std::string_view content) {
  Lexicon lex{std::move(name), LexiconKind::WordList, {}, std::nullopt, {}, {}};
  for (auto& [line, entry] : detail::content_lines(content)) {
    auto pat = tokenize(text::to_lower(entry)).tokens;
    if (pat.empty()) continue;
    lex.entries.push_back(text::to_lower(entry));
    lex.phrases.push_back(std::move(pat));
  }
  if (lex.entries.empty()) throw Error(ErrorKind::EmptyLexicon, kFeaturesModule, "lexicon '" + lex.name + "' has no entries");
  return lex;
}

/// One regular expression per line, matched case-insensitively against
/// windows of the space-joined token stream.
inline Lexicon parse_regex_list(std::string name, std::string_view content) {
  Lexicon lex{std::move(name), LexiconKind::RegexList, {}, std::nullopt, {}, {}};
  for (auto& [line, entry] : detail::content_lines(content)) {
    try {
      lex.regexes.emplace_back(entry, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::InvalidRegex, kFeaturesModule,
                  "lexicon '" + lex.name + "' line " + std::to_string(line) + ": '" + entry + "': " + e.what());
    }
    lex.entries.push_back(entry);
  }
  if (lex.entries.empty()) throw Error(ErrorKind::EmptyLexicon, kFeaturesModule, "lexicon '" + lex.name + "' has no entries");
  return lex;
}

inline Lexicon load_lexicon(std::string name, LexiconKind kind, const std::string& path) {
  const auto content = text::read_file(path, kFeaturesModule);
  if (kind == LexiconKind::RegexList) return parse_regex_list(std::move(name), content);
  if (kind == LexiconKind::WordList) return parse_word_list(std::move(name), content);
  throw Error(ErrorKind::ParseError, kFeaturesModule, "use load_wildcard_dict for wildcard dictionaries");
}

/// Longest window (in tokens) tried for a regex lexicon match.
inline constexpr std::size_t kRegexWindow = 6;

inline FeatureValue count_lexicon(const TokenSeq& tokens, const Lexicon& lex) {
  std::size_t n = 0;
  const auto lowered = tokens.lowered();
  if (lex.kind == LexiconKind::WordList) {
    n = match_phrases(lowered, lex.phrases).size();
  } else if (lex.kind == LexiconKind::RegexList) {
    std::size_t i = 0;
    while (i < lowered.size()) {
      std::size_t matched_end = 0;
      for (std::size_t end = std::min(lowered.size(), i + kRegexWindow); end > i && matched_end == 0; --end) {
        std::string window = lowered[i];
        for (std::size_t k = i + 1; k < end; ++k) window += " " + lowered[k];
        for (const auto& re : lex.regexes)
          if (std::regex_match(window, re)) {
            matched_end = end;
            break;
          }
      }
      if (matched_end > 0) {
        ++n;
        i = matched_end;
      } else {
        ++i;
      }
    }
  } else {
    throw Error(ErrorKind::ParseError, kFeaturesModule, "wildcard lexicons are counted per category");
  }
  return make_feature("lexicon:" + lex.name, static_cast<double>(n), tokens.size());
}

/// LIWC-style dictionary: category -> entries, an entry ending in '*'
/// matching as a prefix.
struct WildcardDict {
  std::vector<std::string> categories;  // file order
  std::map<std::string, std::vector<std::string>> entries;

  bool has(const std::string& category) const { return entries.count(category) > 0; }
};

/// Lines `category<TAB>entry`.
inline WildcardDict parse_wildcard_dict(std::string_view content) {
  WildcardDict dict;
  for (auto& [line, raw] : detail::content_lines(content)) {
    const auto tab = raw.find('\t');
    if (tab == std::string::npos)
      throw Error(ErrorKind::ParseError, kFeaturesModule, "wildcard dict line " + std::to_string(line) + ": expected category<TAB>entry");
    const std::string category(text::trim(std::string_view(raw).substr(0, tab)));
    const std::string entry = text::to_lower(text::trim(std::string_view(raw).substr(tab + 1)));
    const auto star = entry.find('*');
    if (category.empty() || entry.empty() || (star != std::string::npos && star + 1 != entry.size()))
      throw Error(ErrorKind::ParseError, kFeaturesModule, "wildcard dict line " + std::to_string(line) + ": bad entry '" + entry + "'");
    if (!dict.has(category)) dict.categories.push_back(category);
    dict.entries[category].push_back(entry);
  }
  if (dict.categories.empty()) throw Error(ErrorKind::EmptyLexicon, kFeaturesModule, "wildcard dictionary has no entries");
  return dict;
}

inline WildcardDict load_wildcard_dict(const std::string& path) {
  return parse_wildcard_dict(text::read_file(path, kFeaturesModule));
}

inline bool wildcard_matches(std::string_view entry, std::string_view token) {
  if (!entry.empty() && entry.back() == '*') {
    entry.remove_suffix(1);
    return token.size() >= entry.size() && token.substr(0, entry.size()) == entry;
  }
  return token == entry;
}

/// View of one category as a Lexicon value.
inline Lexicon liwc_category_lexicon(const WildcardDict& dict, const std::string& category) {
  if (!dict.has(category)) throw Error(ErrorKind::UnknownCategory, kFeaturesModule, "no category '" + category + "'");
  return Lexicon{"liwc:" + category, LexiconKind::WildcardDict, dict.entries.at(category), category, {}, {}};
}

inline FeatureValue count_liwc_category(const TokenSeq& tokens, const WildcardDict& dict, const std::string& category) {
  const auto it = dict.entries.find(category);
  if (it == dict.entries.end()) throw Error(ErrorKind::UnknownCategory, kFeaturesModule, "no category '" + category + "'");
  std::size_t n = 0;
  for (const auto& tok : tokens.lowered())
    if (std::any_of(it->second.begin(), it->second.end(), [&](const std::string& e) { return wildcard_matches(e, tok); }))
      ++n;
  return make_feature("liwc:" + category, static_cast<double>(n), tokens.size());
}

// ---------------------------------------------------------------------------
// Length and hallucinated names

/// Length is tested raw, so `normalized` is 1 (or 0 for an empty summary).
inline FeatureValue summary_length(const TokenSeq& tokens) {
  const double n = static_cast<double>(tokens.size());
  return {"length", n, tokens.empty() ? 0.0 : 1.0};
}

namespace detail {

inline bool is_capitalized(const std::string& tok) { return !tok.empty() && text::is_ascii_upper(tok.front()); }

inline bool is_sentence_end(const std::string& tok) { return tok == "." || tok == "!" || tok == "?"; }

// A colon introduces a capitalized clause as well ("Navarrette: An ...").
inline bool is_clause_start(const std::vector<std::string>& toks, std::size_t i) {
  return i == 0 || is_sentence_end(toks[i - 1]) || toks[i - 1] == ":";
}

inline const std::set<std::string>& sentence_initial_function_words() {
  static const std::set<std::string> words{"A", "An", "And", "As", "At", "But", "By", "For", "He", "Her", "His",
                                           "I", "If", "In", "It", "Its", "On", "Our", "She", "So", "That", "The",
                                           "Their", "There", "These", "They", "This", "Those", "To", "We", "What",
                                           "When", "Who", "You"};
  return words;
}

}  // namespace detail

/// Maximal runs of capitalized summary tokens none of which occur in the
/// source. The first token of a run opening a sentence or following a colon is dropped when its
/// lowercase form occurs in the source or it is a common function word.
/// Results are unique, in order of first appearance; a later run made only of
/// tokens from an already reported name ("Navarrette" after "Ruben
/// Navarrette") is not reported again.
inline std::vector<std::string> detect_hallucinated_names(const TokenSeq& summary, const TokenSeq& source) {
  const std::set<std::string> source_tokens(source.tokens.begin(), source.tokens.end());
  std::set<std::string> source_lower;
  for (const auto& t : source.tokens) source_lower.insert(text::to_lower(t));

  std::vector<std::string> out;
  std::set<std::string> seen, reported_tokens;
  const auto& toks = summary.tokens;
  std::size_t i = 0;
  while (i < toks.size()) {
    if (!detail::is_capitalized(toks[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < toks.size() && detail::is_capitalized(toks[j])) ++j;
    std::size_t begin = i;
    // A sentence-initial word capitalized only by position is not part of a name.
    const bool sentence_initial = detail::is_clause_start(toks, i);
    if (sentence_initial && (source_lower.count(text::to_lower(toks[i])) > 0 ||
                             detail::sentence_initial_function_words().count(toks[i]) > 0))
      ++begin;
    bool novel = begin < j;
    for (std::size_t k = begin; k < j && novel; ++k) novel = source_tokens.count(toks[k]) == 0;
    if (novel) {
      std::vector<std::string> run(toks.begin() + static_cast<std::ptrdiff_t>(begin),
                                   toks.begin() + static_cast<std::ptrdiff_t>(j));
      const bool repeat = std::all_of(run.begin(), run.end(), [&](const auto& t) { return reported_tokens.count(t) > 0; });
      auto name = text::join(run, " ");
      if (!repeat && seen.insert(name).second) {
        reported_tokens.insert(run.begin(), run.end());
        out.push_back(std::move(name));
      }
    }
    i = j;
  }
  return out;
}

}  // namespace summswap
