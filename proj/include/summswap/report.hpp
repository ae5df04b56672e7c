#pragma once

// Arrow tables over feature batteries, CSV/Markdown export, and drift
// annotations between a baseline table and a rerun.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "summswap/error.hpp"
#include "summswap/stats.hpp"
#include "summswap/text.hpp"

namespace summswap {

inline constexpr std::string_view kReportModule = "report";

struct TierCell {
  Direction direction = Direction::None;
  int arrows = 0;

  bool significant() const noexcept { return arrows > 0; }
  bool operator==(const TierCell&) const = default;
};

/// Parses "—" or 1-4 identical arrows.
inline TierCell parse_tier(std::string_view s) {
  if (s == kNoTier) return {};
  TierCell cell;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::string_view glyph = s.substr(pos, kUpArrow.size());
    const Direction d = glyph == kUpArrow ? Direction::Up : glyph == kDownArrow ? Direction::Down : Direction::None;
    if (d == Direction::None || (cell.arrows > 0 && d != cell.direction))
      throw Error(ErrorKind::MalformedTable, kReportModule, "invalid tier '" + std::string(s) + "'");
    cell.direction = d;
    ++cell.arrows;
    pos += kUpArrow.size();
  }
  if (cell.arrows < 1 || cell.arrows > 4)
    throw Error(ErrorKind::MalformedTable, kReportModule, "invalid tier '" + std::string(s) + "'");
  return cell;
}

inline std::string tier_string(const TierCell& c) {
  if (!c.significant()) return std::string(kNoTier);
  std::string out;
  for (int i = 0; i < c.arrows; ++i) out += c.direction == Direction::Up ? kUpArrow : kDownArrow;
  return out;
}

/// ASCII code for a tier: u1..u4, d1..d4, ns.
inline std::string tier_code(std::string_view tier) {
  const auto c = parse_tier(tier);
  if (!c.significant()) return "ns";
  return std::string(c.direction == Direction::Up ? "u" : "d") + std::to_string(c.arrows);
}

inline std::string tier_from_code(std::string_view code) {
  if (code == "ns") return std::string(kNoTier);
  if (code.size() == 2 && (code[0] == 'u' || code[0] == 'd') && code[1] >= '1' && code[1] <= '4')
    return tier_string({code[0] == 'u' ? Direction::Up : Direction::Down, code[1] - '0'});
  throw Error(ErrorKind::MalformedTable, kReportModule, "invalid tier code '" + std::string(code) + "'");
}

struct TableColumn {
  std::string model_id;
  std::string direction_label;

  std::string header() const { return model_id + ":" + direction_label; }
  bool operator==(const TableColumn&) const = default;
};

struct ReportTable {
  std::vector<std::string> rows;
  std::vector<TableColumn> columns;
  std::vector<std::vector<std::string>> cells;  // [row][column]

  bool operator==(const ReportTable&) const = default;
};

struct ResultGroup {
  std::string model_id;
  std::string direction_label;
  std::vector<TestResult> results;
};

/// Rows follow the first group's feature order. Columns are ordered by model
/// (first appearance), then by direction label (first appearance).
inline ReportTable build_table(const std::vector<ResultGroup>& groups) {
  ReportTable table;
  if (groups.empty()) return table;
  for (const auto& r : groups.front().results) table.rows.push_back(r.feature_name);

  std::vector<std::string> models, directions;
  for (const auto& g : groups) {
    if (std::find(models.begin(), models.end(), g.model_id) == models.end()) models.push_back(g.model_id);
    if (std::find(directions.begin(), directions.end(), g.direction_label) == directions.end())
      directions.push_back(g.direction_label);
  }
  std::vector<const ResultGroup*> ordered;
  for (const auto& m : models)
    for (const auto& d : directions)
      for (const auto& g : groups)
        if (g.model_id == m && g.direction_label == d) ordered.push_back(&g);

  table.cells.assign(table.rows.size(), {});
  for (const auto* g : ordered) {
    table.columns.push_back({g->model_id, g->direction_label});
    for (const auto& r : g->results)
      if (std::find(table.rows.begin(), table.rows.end(), r.feature_name) == table.rows.end())
        throw Error(ErrorKind::InconsistentFeatures, kReportModule,
                    "feature '" + r.feature_name + "' only in " + g->model_id + ":" + g->direction_label);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto it = std::find_if(g->results.begin(), g->results.end(),
                                   [&](const TestResult& r) { return r.feature_name == table.rows[i]; });
      if (it == g->results.end())
        throw Error(ErrorKind::InconsistentFeatures, kReportModule,
                    "feature '" + table.rows[i] + "' missing from " + g->model_id + ":" + g->direction_label);
      parse_tier(it->tier);
      table.cells[i].push_back(it->tier);
    }
  }
  return table;
}

enum class DriftKind { None, IncreasedSignificance, DirectionChange };

inline std::string_view to_string(DriftKind k) {
  switch (k) {
    case DriftKind::None: return "none";
    case DriftKind::IncreasedSignificance: return "increased_significance";
    case DriftKind::DirectionChange: return "direction_change";
  }
  return "none";
}

/// "*" for increased significance, "!" for a direction change.
inline std::string_view drift_marker(DriftKind k) {
  return k == DriftKind::IncreasedSignificance ? "*" : k == DriftKind::DirectionChange ? "!" : "";
}

/// Classifies one cell change. Both significant with opposite arrows is a
/// direction change; more arrows in the same direction, or "—" becoming
/// significant, is increased significance. Anything else is none.
inline DriftKind classify_drift(std::string_view baseline, std::string_view variant) {
  const auto b = parse_tier(baseline), v = parse_tier(variant);
  if (b.significant() && v.significant() && b.direction != v.direction) return DriftKind::DirectionChange;
  if (v.significant() && (!b.significant() || v.arrows > b.arrows)) return DriftKind::IncreasedSignificance;
  return DriftKind::None;
}

struct DriftAnnotation {
  std::size_t row = 0;
  std::size_t column = 0;
  DriftKind kind = DriftKind::None;
};

inline std::vector<DriftAnnotation> compare_tables(const ReportTable& baseline, const ReportTable& variant) {
  if (baseline.rows != variant.rows || baseline.columns != variant.columns)
    throw Error(ErrorKind::ShapeMismatch, kReportModule, "tables differ in rows or columns");
  std::vector<DriftAnnotation> out;
  for (std::size_t i = 0; i < baseline.rows.size(); ++i)
    for (std::size_t j = 0; j < baseline.columns.size(); ++j)
      out.push_back({i, j, classify_drift(baseline.cells[i][j], variant.cells[i][j])});
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

inline std::string table_to_csv(const ReportTable& table) {
  std::string out = "feature";
  for (const auto& c : table.columns) out += "," + text::csv_field(c.header());
  out += '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out += text::csv_field(table.rows[i]);
    for (const auto& cell : table.cells[i]) out += "," + tier_code(cell);
    out += '\n';
  }
  return out;
}

inline ReportTable parse_table_csv(std::string_view content) {
  std::vector<std::string> lines;
  for (auto& l : text::split_lines(content))
    if (!l.empty()) lines.push_back(std::move(l));
  if (lines.empty()) throw Error(ErrorKind::MalformedTable, kReportModule, "empty table CSV");
  ReportTable table;
  const auto header = text::parse_csv_line(lines.front());
  if (header.empty() || header.front() != "feature")
    throw Error(ErrorKind::MalformedTable, kReportModule, "header must start with 'feature'");
  for (std::size_t j = 1; j < header.size(); ++j) {
    const auto colon = header[j].find(':');
    if (colon == std::string::npos)
      throw Error(ErrorKind::MalformedTable, kReportModule, "column '" + header[j] + "' is not model:direction");
    table.columns.push_back({header[j].substr(0, colon), header[j].substr(colon + 1)});
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = text::parse_csv_line(lines[i]);
    if (fields.size() != header.size())
      throw Error(ErrorKind::MalformedTable, kReportModule, "line " + std::to_string(i + 1) + " has wrong field count");
    table.rows.push_back(fields.front());
    std::vector<std::string> row;
    for (std::size_t j = 1; j < fields.size(); ++j) row.push_back(tier_from_code(fields[j]));
    table.cells.push_back(std::move(row));
  }
  return table;
}

inline void export_csv(const ReportTable& table, const std::string& path) {
  text::write_file(path, table_to_csv(table), kReportModule);
}

inline ReportTable load_table_csv(const std::string& path) { return parse_table_csv(text::read_file(path, kReportModule)); }

/// Markdown table with arrow glyphs; optional drift markers appended to cells.
inline std::string render_markdown(const ReportTable& table, const std::vector<DriftAnnotation>& drift = {}) {
  std::string out = "| feature |";
  for (const auto& c : table.columns) out += " " + c.model_id + " " + c.direction_label + " |";
  out += "\n|---|";
  for (std::size_t j = 0; j < table.columns.size(); ++j) out += "---|";
  out += '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out += "| " + table.rows[i] + " |";
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      out += " " + table.cells[i][j];
      for (const auto& d : drift)
        if (d.row == i && d.column == j && d.kind != DriftKind::None) out += " " + std::string(drift_marker(d.kind));
      out += " |";
    }
    out += '\n';
  }
  return out;
}

inline std::string drift_to_csv(const ReportTable& baseline, const ReportTable& variant,
                                const std::vector<DriftAnnotation>& drift) {
  std::string out = "feature,column,baseline,variant,annotation\n";
  for (const auto& d : drift) {
    out += text::csv_field(baseline.rows[d.row]) + "," + text::csv_field(baseline.columns[d.column].header()) + "," +
           tier_code(baseline.cells[d.row][d.column]) + "," + tier_code(variant.cells[d.row][d.column]) + "," +
           std::string(to_string(d.kind)) + "\n";
  }
  return out;
}

inline std::string results_to_csv(const std::vector<TestResult>& results) {
  std::string out = "feature,direction,n,t,p,tier\n";
  for (const auto& r : results)
    out += text::csv_field(r.feature_name) + "," + std::string(to_string(r.direction)) + "," + std::to_string(r.n) + "," +
           format_number(r.t_stat) + "," + format_number(r.p_value) + "," + tier_code(r.tier) + "\n";
  return out;
}

inline std::string fightin_words_to_csv(const std::vector<FightinWordsEntry>& entries) {
  std::string out = "token,z,count_a,count_b\n";
  for (const auto& e : entries)
    out += text::csv_field(e.token) + "," + format_number(e.zscore) + "," + std::to_string(e.count_a) + "," +
           std::to_string(e.count_b) + "\n";
  return out;
}

}  // namespace summswap
