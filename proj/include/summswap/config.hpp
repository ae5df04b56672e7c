#pragma once

// Flat TOML-style experiment configuration:
//
//   key = value            # root table
//   [section.name]         # flat table, no nesting
//   key = value
//
// Values are JSON literals: "strings", numbers, true/false, and arrays of
// them, which is the subset of TOML the experiment configs use.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "summswap/error.hpp"
#include "summswap/text.hpp"

namespace summswap {

inline constexpr std::string_view kConfigModule = "config";

struct ConfigSection {
  std::string name;  // "" for the root table
  std::size_t line = 0;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  std::vector<std::size_t> value_lines;  // parallel to values' insertion order
};

struct ConfigDoc {
  std::vector<ConfigSection> sections;  // root first, then file order

  const ConfigSection& root() const { return sections.front(); }

  /// Sections named "<prefix>.<suffix>", in file order.
  std::vector<const ConfigSection*> with_prefix(std::string_view prefix) const {
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections)
      if (s.name.size() > prefix.size() + 1 && s.name.compare(0, prefix.size(), prefix) == 0 && s.name[prefix.size()] == '.')
        out.push_back(&s);
    return out;
  }

  const ConfigSection* find(std::string_view name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }
};

namespace detail {

/// Drops a '#' comment that is not inside a double-quoted string.
inline std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace detail

inline ConfigDoc parse_config(std::string_view content) {
  ConfigDoc doc;
  doc.sections.push_back({"", 0, nlohmann::ordered_json::object(), {}});
  const auto lines = text::split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1);
    const auto line = text::trim(detail::strip_comment(lines[i]));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw Error(ErrorKind::ParseError, kConfigModule, where + ": malformed section header");
      std::string name(text::trim(line.substr(1, line.size() - 2)));
      if (doc.find(name) != nullptr) throw Error(ErrorKind::ParseError, kConfigModule, where + ": duplicate section [" + name + "]");
      doc.sections.push_back({std::move(name), i + 1, nlohmann::ordered_json::object(), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, kConfigModule, where + ": expected key = value");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view raw = text::trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::ParseError, kConfigModule, where + ": empty key");
    auto& section = doc.sections.back();
    if (section.values.contains(key)) throw Error(ErrorKind::ParseError, kConfigModule, where + ": duplicate key '" + key + "'");
    try {
      section.values[key] = nlohmann::ordered_json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorKind::ParseError, kConfigModule, where + ": cannot parse value for '" + key + "'");
    }
    section.value_lines.push_back(i + 1);
  }
  return doc;
}

}  // namespace summswap
