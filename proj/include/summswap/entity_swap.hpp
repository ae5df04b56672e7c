#pragma once

// Entity name mappings with forward replacement (e1 -> e2) and
// back-replacement (e2 -> e1) over raw text.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "summswap/error.hpp"
#include "summswap/matching.hpp"
#include "summswap/text.hpp"

namespace summswap {

inline constexpr std::string_view kSwapModule = "entity_swap";

struct MappingPair {
  std::string source;
  std::vector<std::string> targets;  // targets.front() is the default substitution

  const std::string& default_target() const { return targets.front(); }
  bool operator==(const MappingPair&) const = default;
};

/// Ordered surface-form pairs. `pairs` is kept longest-source-first
/// (token count, then bytes, then lexicographic).
struct EntityMapping {
  std::vector<MappingPair> pairs;
  std::string direction_label;

  std::vector<std::string> source_forms() const {
    std::vector<std::string> out;
    for (const auto& p : pairs) out.push_back(p.source);
    return out;
  }

  /// Every distinct target form, first-seen order.
  std::vector<std::string> target_forms() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& p : pairs)
      for (const auto& t : p.targets)
        if (seen.insert(t).second) out.push_back(t);
    return out;
  }
};

using RawMappingPairs = std::vector<std::pair<std::string, std::vector<std::string>>>;

inline EntityMapping compile_mapping(const RawMappingPairs& raw, std::string direction_label = {}) {
  EntityMapping m;
  m.direction_label = std::move(direction_label);
  std::set<std::string> seen;
  for (const auto& [source, targets] : raw) {
    if (source.empty()) throw Error(ErrorKind::EmptySourceForm, kSwapModule, "empty source form");
    if (targets.empty()) throw Error(ErrorKind::EmptyTargetList, kSwapModule, "no targets for '" + source + "'");
    for (const auto& t : targets)
      if (t.empty()) throw Error(ErrorKind::EmptyTargetList, kSwapModule, "empty target for '" + source + "'");
    if (!seen.insert(source).second)
      throw Error(ErrorKind::DuplicateSourceForm, kSwapModule, "'" + source + "' appears twice");
    m.pairs.push_back({source, targets});
  }
  std::sort(m.pairs.begin(), m.pairs.end(), [](const MappingPair& a, const MappingPair& b) {
    const auto ta = text::count_words(a.source), tb = text::count_words(b.source);
    if (ta != tb) return ta > tb;
    if (a.source.size() != b.source.size()) return a.source.size() > b.source.size();
    return a.source < b.source;
  });
  return m;
}

/// Mapping file: `[{"source": "...", "targets": ["...", ...]}, ...]`.
inline EntityMapping parse_mapping_json(std::string_view content, std::string direction_label = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, kSwapModule, e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::ParseError, kSwapModule, "mapping must be a JSON array");
  RawMappingPairs raw;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    if (!e.is_object() || !e.contains("source") || !e["source"].is_string() || !e.contains("targets") ||
        !e["targets"].is_array())
      throw Error(ErrorKind::ParseError, kSwapModule, "entry " + std::to_string(i) + " needs source and targets");
    std::vector<std::string> targets;
    for (const auto& t : e["targets"]) {
      if (!t.is_string()) throw Error(ErrorKind::ParseError, kSwapModule, "entry " + std::to_string(i) + ": non-string target");
      targets.push_back(t.get<std::string>());
    }
    raw.emplace_back(e["source"].get<std::string>(), std::move(targets));
  }
  return compile_mapping(raw, std::move(direction_label));
}

inline EntityMapping load_mapping(const std::string& path, std::string direction_label = {}) {
  return parse_mapping_json(text::read_file(path, kSwapModule), std::move(direction_label));
}

inline std::string mapping_to_json(const EntityMapping& m) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& p : m.pairs) doc.push_back({{"source", p.source}, {"targets", p.targets}});
  return doc.dump();
}

inline std::uint64_t mapping_hash(const EntityMapping& m) { return text::fnv1a(mapping_to_json(m)); }

struct ReplacementReport {
  std::size_t replaced_count = 0;
  std::size_t residual_source_forms = 0;
};

struct ReplacementResult {
  std::string text;
  ReplacementReport report;
};

namespace detail {

inline std::string substitute(std::string_view input, const SurfaceScanner& scanner,
                              const std::vector<std::string>& replacement, std::size_t* count) {
  std::string out;
  out.reserve(input.size());
  std::size_t pos = 0;
  const auto matches = scanner.scan(input);
  for (const auto& m : matches) {
    out.append(input.substr(pos, m.begin - pos));
    out += replacement[m.form];
    pos = m.begin + m.length;
  }
  out.append(input.substr(pos));
  if (count != nullptr) *count = matches.size();
  return out;
}

}  // namespace detail

/// Replaces every whole-token source form with its default target, scanning
/// left to right and taking the longest source form at each position.
inline ReplacementResult replace_entities(std::string_view input, const EntityMapping& mapping) {
  std::vector<std::string> forms, repl;
  for (const auto& p : mapping.pairs) {
    forms.push_back(p.source);
    repl.push_back(p.default_target());
  }
  const SurfaceScanner scanner(forms);
  ReplacementResult r;
  r.text = detail::substitute(input, scanner, repl, &r.report.replaced_count);
  r.report.residual_source_forms = scanner.count(r.text);
  return r;
}

/// target form -> source form used when back-replacing.
struct InverseMapping {
  std::vector<std::string> target_forms;
  std::vector<std::string> source_for_target;
};

/// Each target form maps back to a source listing it. Sources are grouped by
/// their default target; a target reachable from two groups is ambiguous.
/// Within a group the shortest source wins.
inline InverseMapping invert_mapping(const EntityMapping& mapping) {
  std::map<std::string, std::vector<const MappingPair*>> candidates;
  for (const auto& p : mapping.pairs)
    for (const auto& t : p.targets) candidates[t].push_back(&p);
  InverseMapping inv;
  for (const auto& target : mapping.target_forms()) {
    const auto& cands = candidates[target];
    std::set<std::string> groups;
    for (const auto* p : cands) groups.insert(p->default_target());
    if (groups.size() > 1)
      throw Error(ErrorKind::AmbiguousInverse, kSwapModule,
                  "'" + target + "' is reachable from " + std::to_string(groups.size()) + " source groups");
    const auto* best = *std::min_element(cands.begin(), cands.end(), [](const MappingPair* a, const MappingPair* b) {
      if (a->source.size() != b->source.size()) return a->source.size() < b->source.size();
      return a->source < b->source;
    });
    inv.target_forms.push_back(target);
    inv.source_for_target.push_back(best->source);
  }
  return inv;
}

inline std::string back_replace(std::string_view summary, const InverseMapping& inverse, bool case_insensitive = false) {
  const SurfaceScanner scanner(inverse.target_forms, case_insensitive);
  return detail::substitute(summary, scanner, inverse.source_for_target, nullptr);
}

inline std::string back_replace(std::string_view summary, const EntityMapping& mapping, bool case_insensitive = false) {
  return back_replace(summary, invert_mapping(mapping), case_insensitive);
}

/// Source forms that survive replace-then-back-replace unchanged.
inline std::vector<std::string> canonical_source_forms(const EntityMapping& mapping) {
  const auto inv = invert_mapping(mapping);
  std::vector<std::string> out;
  for (const auto& p : mapping.pairs) {
    const auto it = std::find(inv.target_forms.begin(), inv.target_forms.end(), p.default_target());
    if (inv.source_for_target[static_cast<std::size_t>(it - inv.target_forms.begin())] == p.source)
      out.push_back(p.source);
  }
  return out;
}

inline std::size_t residual_mentions(std::string_view input, const std::vector<std::string>& forms) {
  return SurfaceScanner(forms).count(input);
}

}  // namespace summswap
