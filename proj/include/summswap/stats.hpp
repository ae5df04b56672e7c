#pragma once

// Paired t-tests with arrow tiers, Fightin' Words log-odds with a Dirichlet
// prior, similarity percentile splits, and feature batteries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "summswap/error.hpp"
#include "summswap/features.hpp"
#include "summswap/summarizers.hpp"
#include "summswap/tokenizer.hpp"

namespace summswap {

inline constexpr std::string_view kStatsModule = "stats";

// ---------------------------------------------------------------------------
// Special functions

namespace detail {

/// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

// ---------------------------------------------------------------------------
// Paired t-test and tiers

enum class Direction { Up, Down, None };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    case Direction::None: return "none";
  }
  return "none";
}

inline constexpr std::string_view kUpArrow = "\xE2\x86\x91";    // ↑
inline constexpr std::string_view kDownArrow = "\xE2\x86\x93";  // ↓
inline constexpr std::string_view kNoTier = "\xE2\x80\x94";     // —

/// Arrow count for a p-value: 4 below 1e-20, 3 below 0.001, 2 below 0.01,
/// 1 below 0.05, else 0.
inline int tier_arrows(double p) {
  if (p < 1e-20) return 4;
  if (p < 0.001) return 3;
  if (p < 0.01) return 2;
  if (p < 0.05) return 1;
  return 0;
}

inline std::string significance_tier(double p, Direction direction) {
  const int n = tier_arrows(p);
  if (n == 0 || direction == Direction::None) return std::string(kNoTier);
  std::string out;
  for (int i = 0; i < n; ++i) out += direction == Direction::Up ? kUpArrow : kDownArrow;
  return out;
}

struct PairedSample {
  std::string feature_name;
  std::vector<double> values_original;
  std::vector<double> values_replaced;
};

struct TestResult {
  std::string feature_name;
  double t_stat = 0.0;
  double p_value = 1.0;
  Direction direction = Direction::None;
  std::string tier = std::string(kNoTier);
  std::size_t n = 0;
  bool degenerate = false;  // all differences equal
  std::string note;         // excluded pairs, errors
};

/// Paired two-sided t-test on d = replaced - original. When every d is zero
/// the result is p = 1; when every d is the same nonzero value, p = 0 with
/// the sign's direction. Both cases are flagged degenerate.
inline TestResult paired_t_test(const PairedSample& sample, double alpha = 0.05) {
  const auto& a = sample.values_original;
  const auto& b = sample.values_replaced;
  if (a.size() != b.size())
    throw Error(ErrorKind::LengthMismatch, kStatsModule, "'" + sample.feature_name + "': sample lengths differ");
  if (a.size() < 2) throw Error(ErrorKind::TooFewSamples, kStatsModule, "'" + sample.feature_name + "': need n >= 2");

  TestResult r;
  r.feature_name = sample.feature_name;
  r.n = a.size();
  const double n = static_cast<double>(r.n);
  std::vector<double> d(r.n);
  for (std::size_t i = 0; i < r.n; ++i) d[i] = b[i] - a[i];
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= n;

  if (std::all_of(d.begin(), d.end(), [&](double x) { return x == d.front(); })) {
    r.degenerate = true;
    if (d.front() == 0.0) {
      r.t_stat = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_stat = d.front() > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
  } else {
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    r.t_stat = mean * std::sqrt(n) / sd;
    r.p_value = student_t_two_sided_p(r.t_stat, n - 1.0);
  }
  if (r.p_value < alpha) r.direction = mean > 0 ? Direction::Up : (mean < 0 ? Direction::Down : Direction::None);
  r.tier = significance_tier(r.p_value, r.direction);
  return r;
}

// ---------------------------------------------------------------------------
// Fightin' Words

struct FightinWordsEntry {
  std::string token;
  double zscore = 0.0;
  long count_a = 0;
  long count_b = 0;
};

using TokenCounts = std::map<std::string, long>;

/// Log-odds ratio with a uniform Dirichlet prior (alpha_w = prior_weight for
/// every word, alpha_0 = |V| * prior_weight), z-scored by its approximate
/// variance 1/(y_a + alpha_w) + 1/(y_b + alpha_w). Sorted by z descending.
inline std::vector<FightinWordsEntry> fightin_words(const TokenCounts& counts_a, const TokenCounts& counts_b,
                                                    double prior_weight) {
  if (!(prior_weight > 0.0) || !std::isfinite(prior_weight))
    throw Error(ErrorKind::InvalidPrior, kStatsModule, "prior weight must be positive");
  double n_a = 0.0, n_b = 0.0;
  for (const auto& [w, c] : counts_a) n_a += static_cast<double>(c);
  for (const auto& [w, c] : counts_b) n_b += static_cast<double>(c);
  if (n_a <= 0.0 || n_b <= 0.0) throw Error(ErrorKind::EmptyCorpus, kStatsModule, "both corpora need positive counts");

  TokenCounts vocab;
  for (const auto& [w, c] : counts_a) vocab[w];
  for (const auto& [w, c] : counts_b) vocab[w];
  const double alpha = prior_weight;
  const double alpha0 = static_cast<double>(vocab.size()) * alpha;

  std::vector<FightinWordsEntry> out;
  out.reserve(vocab.size());
  for (const auto& [w, unused] : vocab) {
    const auto ia = counts_a.find(w), ib = counts_b.find(w);
    const long ya = ia == counts_a.end() ? 0 : ia->second;
    const long yb = ib == counts_b.end() ? 0 : ib->second;
    double z = 0.0;
    // With a one-word vocabulary both log-odds are undefined and nothing separates the corpora.
    if (vocab.size() > 1) {
      const double la = std::log((ya + alpha) / (n_a + alpha0 - ya - alpha));
      const double lb = std::log((yb + alpha) / (n_b + alpha0 - yb - alpha));
      const double var = 1.0 / (ya + alpha) + 1.0 / (yb + alpha);
      z = (la - lb) / std::sqrt(var);
    }
    out.push_back({w, z, ya, yb});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FightinWordsEntry& x, const FightinWordsEntry& y) { return x.zscore > y.zscore; });
  return out;
}

/// Lowercased token counts, skipping pure-punctuation tokens.
inline TokenCounts count_tokens(const std::vector<std::string>& texts) {
  TokenCounts counts;
  for (const auto& t : texts)
    for (const auto& tok : tokenize(t).tokens) {
      std::size_t len = 1;
      bool all_punct = true;
      for (std::size_t i = 0; i < tok.size() && all_punct; i += len)
        all_punct = detail::is_punct_cp(text::decode_at(tok, i, &len));
      if (!all_punct) ++counts[text::to_lower(tok)];
    }
  return counts;
}

// ---------------------------------------------------------------------------
// Similarity split

/// Linear interpolation between closest ranks; `sorted` must be ascending.
inline double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct SimilaritySplit {
  std::vector<std::string> high_sim;
  std::vector<std::string> low_sim;
  double p75 = 0.0;
  double p25 = 0.0;
  bool extractive_mode = false;
  bool degenerate = false;  // p25 == p75; ties go to high_sim
};

/// HighSim = score >= p75, LowSim = score <= p25 (ids in HighSim excluded).
/// In extractive mode HighSim = score == 1.0 and LowSim = score < 1.0.
inline SimilaritySplit percentile_split(const std::map<std::string, double>& scores, bool extractive_mode) {
  if (scores.size() < 4)
    throw Error(ErrorKind::TooFewScores, kStatsModule, "need >= 4 scores, got " + std::to_string(scores.size()));
  std::vector<double> sorted;
  for (const auto& [id, s] : scores) sorted.push_back(s);
  std::sort(sorted.begin(), sorted.end());
  SimilaritySplit split;
  split.extractive_mode = extractive_mode;
  split.p75 = percentile(sorted, 0.75);
  split.p25 = percentile(sorted, 0.25);
  split.degenerate = split.p25 == split.p75;
  for (const auto& [id, s] : scores) {
    if (extractive_mode) {
      if (s == 1.0) split.high_sim.push_back(id);
      else if (s < 1.0) split.low_sim.push_back(id);
    } else if (s >= split.p75) {
      split.high_sim.push_back(id);
    } else if (s <= split.p25) {
      split.low_sim.push_back(id);
    }
  }
  return split;
}

// ---------------------------------------------------------------------------
// Feature battery

inline FeatureValue summary_length(const SummaryRecord& record) {
  return {"length", static_cast<double>(record.token_length), record.token_length == 0 ? 0.0 : 1.0};
}

struct FeatureSpec {
  std::string name;
  std::function<FeatureValue(const TokenSeq&)> compute;
  bool use_raw = false;  // compare raw counts instead of length-normalized ones
};

struct BatteryOptions {
  bool bonferroni = false;
  double alpha = 0.05;
};

/// Original summary vs back-mapped replaced summary, tokenized.
struct TokenizedPair {
  std::string article_id;
  TokenSeq original;
  TokenSeq replaced;
};

inline std::vector<TokenizedPair> tokenize_pairs(const std::vector<SummaryPair>& pairs) {
  std::vector<TokenizedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({p.article_id, tokenize(p.original.summary_text), tokenize(p.replaced_backmapped)});
  return out;
}

/// One TestResult per feature, in feature order. Pairs with an empty summary
/// on either side are left out (0/0 frequency). A failing feature yields a
/// "—" row whose note carries the error; the battery continues.
inline std::vector<TestResult> run_feature_battery(const std::vector<TokenizedPair>& pairs,
                                                   const std::vector<FeatureSpec>& features,
                                                   const BatteryOptions& options = {}) {
  if (pairs.empty()) throw Error(ErrorKind::TooFewSamples, kStatsModule, "feature battery needs at least one pair");
  std::vector<const TokenizedPair*> usable;
  for (const auto& p : pairs)
    if (!p.original.empty() && !p.replaced.empty()) usable.push_back(&p);
  const std::size_t excluded = pairs.size() - usable.size();

  std::vector<TestResult> results;
  for (const auto& f : features) {
    try {
      PairedSample sample{f.name, {}, {}};
      for (const auto* p : usable) {
        const auto a = f.compute(p->original), b = f.compute(p->replaced);
        sample.values_original.push_back(f.use_raw ? a.raw_count : a.normalized);
        sample.values_replaced.push_back(f.use_raw ? b.raw_count : b.normalized);
      }
      auto r = paired_t_test(sample, options.alpha);
      if (options.bonferroni) {
        r.p_value = std::min(1.0, r.p_value * static_cast<double>(features.size()));
        if (r.p_value >= options.alpha) r.direction = Direction::None;
        r.tier = significance_tier(r.p_value, r.direction);
      }
      if (excluded > 0) r.note = std::to_string(excluded) + " empty-summary pairs excluded";
      results.push_back(std::move(r));
    } catch (const Error& e) {
      TestResult r;
      r.feature_name = f.name;
      r.n = usable.size();
      r.note = e.what();
      results.push_back(std::move(r));
    }
  }
  return results;
}

inline std::vector<TestResult> run_feature_battery(const std::vector<SummaryPair>& pairs,
                                                   const std::vector<FeatureSpec>& features,
                                                   const BatteryOptions& options = {}) {
  return run_feature_battery(tokenize_pairs(pairs), features, options);
}

}  // namespace summswap
