// Acceptance suite: one PASS/FAIL line per primary criterion, exit status 1
// if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/regex.hpp>

#include "summswap/entity_swap.hpp"
#include "summswap/features.hpp"
#include "summswap/report.hpp"
#include "summswap/stats.hpp"
#include "summswap/textsim.hpp"

namespace fs = std::filesystem;
using namespace summswap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  char t[32];
  std::snprintf(t, sizeof(t), "%.2fs", secs);
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << t << "] " << o.detail << std::endl;
}

// ---------------------------------------------------------------------------
// Similarity: exhaustive longest-block oracle

std::size_t oracle_matches(const std::vector<int>& a, std::size_t alo, std::size_t ahi, const std::vector<int>& b,
                           std::size_t blo, std::size_t bhi) {
  std::size_t best_i = alo, best_j = blo, best_k = 0;
  for (std::size_t i = alo; i < ahi; ++i)
    for (std::size_t j = blo; j < bhi; ++j) {
      std::size_t k = 0;
      while (i + k < ahi && j + k < bhi && a[i + k] == b[j + k]) ++k;
      if (k > best_k) {
        best_i = i;
        best_j = j;
        best_k = k;
      }
    }
  if (best_k == 0) return 0;
  return best_k + oracle_matches(a, alo, best_i, b, blo, best_j) +
         oracle_matches(a, best_i + best_k, ahi, b, best_j + best_k, bhi);
}

Outcome check_similarity() {
  std::mt19937_64 rng(20221);
  std::uniform_int_distribution<int> len(0, 8), sym(0, 3);
  const auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0, mismatches = 0, both_empty = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<int> a(len(rng)), b(len(rng));
    for (auto& x : a) x = sym(rng);
    for (auto& x : b) x = sym(rng);
    if (a.empty() && b.empty()) {
      try {
        similarity_ratio<int>(std::span<const int>(a), std::span<const int>(b));
        ++mismatches;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BothEmpty) ++mismatches;
      }
      ++both_empty;
      continue;
    }
    const auto got = similarity_ratio<int>(std::span<const int>(a), std::span<const int>(b));
    const std::size_t m = oracle_matches(a, 0, a.size(), b, 0, b.size());
    const double expected = 2.0 * static_cast<double>(m) / static_cast<double>(a.size() + b.size());
    if (got.matches != m || got.value != expected || got.total != a.size() + b.size()) ++mismatches;
    ++checked;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream os;
  os << checked << " pairs + " << both_empty << " both-empty, " << mismatches << " mismatches, " << secs << " s";
  return {mismatches == 0 && secs < 30.0, os.str()};
}

// ---------------------------------------------------------------------------

Outcome check_tiers() {
  const std::vector<std::pair<double, int>> cases{{1e-21, 4}, {1e-4, 3}, {5e-3, 2}, {0.04, 1}, {0.05, 0}, {0.5, 0}};
  std::ostringstream os;
  bool ok = true;
  for (const auto& [p, arrows] : cases) {
    for (const auto dir : {Direction::Up, Direction::Down}) {
      const auto tier = significance_tier(p, dir);
      std::string expected;
      for (int i = 0; i < arrows; ++i) expected += dir == Direction::Up ? "\xE2\x86\x91" : "\xE2\x86\x93";
      if (arrows == 0) expected = "\xE2\x80\x94";
      if (tier != expected) {
        ok = false;
        os << "p=" << p << " " << to_string(dir) << " gave '" << tier << "' ";
      }
    }
  }
  if (ok) os << "12 (p, direction) cases exact";
  return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// t-test: two-sided p from quadrature over the Student t density

double oracle_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const double log_c = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI);
  auto density = [&](double x) { return std::exp(log_c - (df + 1) / 2 * std::log1p(x * x / df)); };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double tail = integrator.integrate([&](double u) { return density(std::fabs(t) + u); }, 1e-15);
  return std::min(1.0, 2.0 * tail);
}

Outcome check_ttest() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> n_dist(2, 50);
  std::uniform_real_distribution<double> shift(-1.5, 1.5), scale(0.1, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = n_dist(rng);
    std::normal_distribution<double> noise(shift(rng), scale(rng));
    PairedSample s{"x", {}, {}};
    for (int i = 0; i < n; ++i) {
      const double base = noise(rng);
      s.values_original.push_back(base);
      s.values_replaced.push_back(base + noise(rng));
    }
    const auto r = paired_t_test(s);
    worst = std::max(worst, std::fabs(r.p_value - oracle_two_sided_p(r.t_stat, n - 1)));
  }
  const auto ex = paired_t_test({"x", {0, 0, 0}, {1, 2, 3}});
  const double t_err = std::fabs(ex.t_stat - 2 * std::sqrt(3.0));
  const double p_err = std::fabs(ex.p_value - 0.0742);
  std::ostringstream os;
  os << "max |p - oracle| = " << worst << " over 1000 samples; worked example t=" << ex.t_stat << " p=" << ex.p_value;
  return {worst <= 1e-8 && t_err <= 1e-4 && p_err <= 1e-4, os.str()};
}

// ---------------------------------------------------------------------------

Outcome check_fightin_words() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> vocab_size(2, 40), count(0, 30);
  double worst_anti = 0.0, worst_zero = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    TokenCounts a, b;
    const int v = vocab_size(rng);
    for (int w = 0; w < v; ++w) {
      const std::string tok = "w" + std::to_string(w);
      if (const int c = count(rng)) a[tok] = c;
      if (const int c = count(rng)) b[tok] = c;
    }
    a["anchor"] += 1;
    b["anchor"] += 1;
    std::map<std::string, double> ab, ba;
    for (const auto& e : fightin_words(a, b, 0.01)) ab[e.token] = e.zscore;
    for (const auto& e : fightin_words(b, a, 0.01)) ba[e.token] = e.zscore;
    for (const auto& [tok, z] : ab) worst_anti = std::max(worst_anti, std::fabs(z + ba.at(tok)));
    for (const auto& e : fightin_words(a, a, 0.01)) worst_zero = std::max(worst_zero, std::fabs(e.zscore));
  }
  double z_red = 0.0;
  for (const auto& e : fightin_words({{"red", 9}, {"blue", 1}}, {{"red", 1}, {"blue", 9}}, 0.5))
    if (e.token == "red") z_red = e.zscore;
  // Hand-derived closed form for this example.
  const double hand = 2.0 * std::log(19.0 / 3.0) / std::sqrt(1.0 / 9.5 + 1.0 / 1.5);
  std::ostringstream os;
  os << "antisymmetry max err " << worst_anti << ", identical-corpora max |z| " << worst_zero << ", z_red=" << z_red
     << " vs closed form " << hand << " (printed approximation 4.200 differs by " << std::fabs(hand - 4.200) << ")";
  return {worst_anti <= 1e-12 && worst_zero == 0.0 && std::fabs(z_red - hand) <= 1e-3, os.str()};
}

// ---------------------------------------------------------------------------
// Replacement safety against a regex oracle

std::string regex_escape(const std::string& s) {
  static const boost::regex special(R"([.^$|()\[\]{}*+?\\])");
  return boost::regex_replace(s, special, R"(\\$&)", boost::format_perl);
}

/// Leftmost-longest substitution with letter lookarounds, via boost::regex.
std::string oracle_replace(const std::string& input, const EntityMapping& m) {
  std::vector<const MappingPair*> pairs;
  for (const auto& p : m.pairs) pairs.push_back(&p);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const MappingPair* a, const MappingPair* b) { return a->source.size() > b->source.size(); });
  std::string alt;
  std::map<std::string, std::string> target;
  for (const auto* p : pairs) {
    alt += (alt.empty() ? "" : "|") + regex_escape(p->source);
    target[p->source] = p->default_target();
  }
  const boost::regex re("(?<![A-Za-z])(?:" + alt + ")(?![A-Za-z])");
  std::string out;
  auto last = input.cbegin();
  for (boost::sregex_iterator it(input.begin(), input.end(), re), end; it != end; ++it) {
    out.append(last, (*it)[0].first);
    out += target.at(it->str());
    last = (*it)[0].second;
  }
  out.append(last, input.cend());
  return out;
}

std::size_t count_substr(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

Outcome check_replacement() {
  const auto t2b = load_mapping(std::string(SUMMSWAP_DATA_DIR) + "/mapping_trump_to_biden.json", "T→B");
  const auto b2t = load_mapping(std::string(SUMMSWAP_DATA_DIR) + "/mapping_biden_to_trump.json", "B→T");
  const std::vector<std::string> decoys{"Trumpian", "realdonaldtrump", "@realDonaldTrump", "Trumps", "Bidenomics",
                                        "Donald Trumpian", "Joe Bidenesque", "trump card"};
  const std::vector<std::string> filler{"the", "rally", "in", "Ohio", "said", "on", "Monday", "crowd", "and", "of"};
  const std::vector<std::string> b2t_canonical = canonical_source_forms(b2t);

  std::mt19937_64 rng(1234);
  std::size_t residual = 0, decoy_damage = 0, oracle_diff = 0, round_trip_fail = 0, replacements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool forward = trial % 2 == 0;
    const auto& m = forward ? t2b : b2t;
    // Every other B→T text uses only the canonical Biden forms, which round-trip exactly.
    const bool canonical_only = !forward && trial % 4 == 1;
    const auto forms = canonical_only ? b2t_canonical : m.source_forms();
    std::string text;
    const int n = std::uniform_int_distribution<int>(5, 30)(rng);
    for (int k = 0; k < n; ++k) {
      const int kind = std::uniform_int_distribution<int>(0, 9)(rng);
      std::string piece;
      if (kind < 3) piece = forms[rng() % forms.size()] + (rng() % 4 == 0 ? "'s" : "");
      else if (kind < 5) piece = decoys[rng() % decoys.size()];
      else piece = filler[rng() % filler.size()];
      if (!text.empty()) text += rng() % 5 == 0 ? ", " : " ";
      text += piece;
    }
    text += ".";

    const auto r = replace_entities(text, m);
    replacements += r.report.replaced_count;
    if (r.report.residual_source_forms != 0 || residual_mentions(r.text, m.source_forms()) != 0) ++residual;
    if (r.text != oracle_replace(text, m)) ++oracle_diff;
    for (const auto& d : decoys)
      if (count_substr(r.text, d) < count_substr(text, d)) ++decoy_damage;
    if ((forward || canonical_only) && back_replace(r.text, m) != text) ++round_trip_fail;
  }
  std::ostringstream os;
  os << "1000 texts, " << replacements << " replacements; residual " << residual << ", decoys altered " << decoy_damage
     << ", oracle mismatches " << oracle_diff << ", round-trip failures " << round_trip_fail;
  return {residual == 0 && decoy_damage == 0 && oracle_diff == 0 && round_trip_fail == 0, os.str()};
}

// ---------------------------------------------------------------------------
// Planted-bias end-to-end run through the CLI

Outcome check_planted() {
  const fs::path out = fs::path(SUMMSWAP_BINARY_DIR) / "planted_run";
  fs::remove_all(out);
  const std::string cmd = std::string("\"") + SUMMSWAP_CLI + "\" run --config \"" + SUMMSWAP_PLANTED_CONFIG +
                          "\" --out-dir \"" + out.string() + "\" --jobs 2 > \"" + (out.string() + ".log") + "\" 2>&1";
  const auto start = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
    return {false, "summswap run failed, see " + out.string() + ".log"};

  const auto table = load_table_csv((out / "battery.csv").string());
  const auto col = [&](const std::string& header) {
    for (std::size_t j = 0; j < table.columns.size(); ++j)
      if (table.columns[j].header() == header) return j;
    throw std::runtime_error("missing column " + header);
  };
  const std::size_t t2b = col("mock:T→B"), b2t = col("mock:B→T");
  const std::set<std::string> planted{"entity_mentions", "phrase:administration"};
  std::ostringstream os;
  bool ok = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto a = parse_tier(table.cells[i][t2b]), b = parse_tier(table.cells[i][b2t]);
    if (planted.count(table.rows[i])) {
      const bool good = a.direction == Direction::Up && a.arrows >= 3 && b.direction == Direction::Down && b.arrows >= 3;
      os << table.rows[i] << " " << table.cells[i][t2b] << "/" << table.cells[i][b2t] << "; ";
      ok = ok && good;
    } else if (a.significant() || b.significant()) {
      os << "unexpected " << table.rows[i] << " " << table.cells[i][t2b] << "/" << table.cells[i][b2t] << "; ";
      ok = false;
    }
  }
  os << table.rows.size() - planted.size() << " other rows all ns=" << (ok ? "yes" : "no") << "; " << secs << " s";
  return {ok && secs < 60.0, os.str()};
}

// ---------------------------------------------------------------------------

Outcome check_split() {
  std::map<std::string, double> scores;
  for (int i = 0; i < 100; ++i) scores["a" + std::to_string(i)] = (i * 37 % 100) / 100.0 + 0.001;
  const auto s = percentile_split(scores, false);
  const bool sizes = s.high_sim.size() >= 24 && s.high_sim.size() <= 26 && s.low_sim.size() >= 24 && s.low_sim.size() <= 26;

  std::map<std::string, double> ext;
  std::mt19937_64 rng(5);
  std::set<std::string> expect_low, expect_high;
  for (int i = 0; i < 60; ++i) {
    const std::string id = "e" + std::to_string(i);
    const double v = rng() % 3 == 0 ? std::uniform_real_distribution<double>(0.2, 0.999)(rng) : 1.0;
    ext[id] = v;
    (v < 1.0 ? expect_low : expect_high).insert(id);
  }
  const auto e = percentile_split(ext, true);
  const bool extractive = std::set<std::string>(e.low_sim.begin(), e.low_sim.end()) == expect_low &&
                          std::set<std::string>(e.high_sim.begin(), e.high_sim.end()) == expect_high;
  std::ostringstream os;
  os << "100 distinct: high " << s.high_sim.size() << ", low " << s.low_sim.size() << "; extractive low "
     << e.low_sim.size() << "/" << expect_low.size() << " exact=" << (extractive ? "yes" : "no");
  return {sizes && extractive, os.str()};
}

Outcome check_drift() {
  const std::string down = "\xE2\x86\x93", up = "\xE2\x86\x91";
  const bool a = classify_drift(down, down + down) == DriftKind::IncreasedSignificance;
  const bool b = classify_drift(down + down, up + up + up) == DriftKind::DirectionChange;
  bool c = true;
  for (const std::string cell : {std::string(kNoTier), up, down + down, up + up + up + up})
    c = c && classify_drift(cell, cell) == DriftKind::None;
  ReportTable base{{"f1", "f2", "f3"}, {{"m", "T→B"}}, {{down}, {down + down}, {up}}};
  ReportTable rerun{{"f1", "f2", "f3"}, {{"m", "T→B"}}, {{down + down}, {up + up + up}, {up}}};
  const auto drift = compare_tables(base, rerun);
  const bool table = drift.size() == 3 && drift[0].kind == DriftKind::IncreasedSignificance &&
                     drift[1].kind == DriftKind::DirectionChange && drift[2].kind == DriftKind::None;
  std::ostringstream os;
  os << "(↓,↓↓)=" << (a ? "increased_significance" : "wrong") << " (↓↓,↑↑↑)=" << (b ? "direction_change" : "wrong")
     << " equal=" << (c ? "none" : "wrong") << " table=" << (table ? "ok" : "wrong");
  return {a && b && c && table, os.str()};
}

Outcome check_hallucination() {
  const auto summary = tokenize(
      "The Supreme Court shot down the Trump administration's efforts to undo the Obama-era Deferred Action for "
      "Childhood Arrivals program. Ruben Navarrette: DACA is a temporary solution to a broader problem. He says "
      "Congress must get its act together and take an obvious step in the national interest. Navarrette: An "
      "overwhelming majority of Americans. believe the government should leave the Dreamers alone and craft a path "
      "to citizenship.");
  const auto source = tokenize(
      "The Supreme Court on Thursday blocked the Trump administration from ending the Obama-era Deferred Action for "
      "Childhood Arrivals program, known as DACA. The ruling is a temporary reprieve for the Dreamers. Congress "
      "must now act. A majority of Americans support a path to citizenship, and the government should take that "
      "step in the national interest.");
  const auto found = detect_hallucinated_names(summary, source);
  const auto restricted = tokenize(
      "The Supreme Court blocked the Trump administration. Congress must act for the Dreamers and DACA.");
  const auto none = detect_hallucinated_names(restricted, source);
  std::ostringstream os;
  os << "found [";
  for (std::size_t i = 0; i < found.size(); ++i) os << (i ? ", " : "") << found[i];
  os << "], source-vocabulary summary gives " << none.size() << " names";
  return {found == std::vector<std::string>{"Ruben Navarrette"} && none.empty(), os.str()};
}

}  // namespace

int main() {
  report("similarity oracle equivalence", check_similarity);
  report("tier mapping", check_tiers);
  report("t-test oracle", check_ttest);
  report("fightin words properties", check_fightin_words);
  report("replacement safety", check_replacement);
  report("planted bias end to end", check_planted);
  report("split semantics", check_split);
  report("drift annotations", check_drift);
  report("hallucination detector", check_hallucination);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
