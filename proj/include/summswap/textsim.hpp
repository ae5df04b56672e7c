#pragma once

// Gestalt (Ratcliff/Obershelp) similarity over token sequences: 2*M/T where M
// is the number of elements covered by the recursive longest-matching-block
// decomposition and T = |a| + |b|. No junk heuristics.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "summswap/error.hpp"

namespace summswap {

inline constexpr std::string_view kTextsimModule = "textsim";

struct SimilarityScore {
  double value = 0.0;
  std::size_t matches = 0;
  std::size_t total = 0;
};

struct MatchingBlock {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t size = 0;

  bool operator==(const MatchingBlock&) const = default;
};

/// Longest common contiguous block of a[alo:ahi) and b[blo:bhi). Ties go to
/// the smallest start in `a`, then the smallest start in `b`.
template <typename T, typename Hash = std::hash<T>>
class GestaltMatcher {
 public:
  GestaltMatcher(std::span<const T> a, std::span<const T> b) : a_(a), b_(b) {
    for (std::size_t j = 0; j < b_.size(); ++j) b2j_[b_[j]].push_back(j);
  }

  MatchingBlock find_longest_match(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi) const {
    MatchingBlock best{alo, blo, 0};
    // lengths of matches ending at (i-1, j) for the previous row
    std::unordered_map<std::size_t, std::size_t> prev, cur;
    for (std::size_t i = alo; i < ahi; ++i) {
      cur.clear();
      const auto it = b2j_.find(a_[i]);
      if (it != b2j_.end()) {
        for (std::size_t j : it->second) {
          if (j < blo) continue;
          if (j >= bhi) break;
          std::size_t k = 1;
          if (j > 0) {
            const auto p = prev.find(j - 1);
            if (p != prev.end()) k = p->second + 1;
          }
          cur[j] = k;
          if (k > best.size) best = {i + 1 - k, j + 1 - k, k};
        }
      }
      std::swap(prev, cur);
    }
    return best;
  }

  /// Blocks in increasing (a, b) order, without the terminating sentinel.
  std::vector<MatchingBlock> matching_blocks() const {
    std::vector<MatchingBlock> blocks;
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>> todo{
        {{0, a_.size()}, {0, b_.size()}}};
    while (!todo.empty()) {
      const auto [ar, br] = todo.back();
      todo.pop_back();
      const auto m = find_longest_match(ar.first, ar.second, br.first, br.second);
      if (m.size == 0) continue;
      blocks.push_back(m);
      if (ar.first < m.a && br.first < m.b) todo.push_back({{ar.first, m.a}, {br.first, m.b}});
      if (m.a + m.size < ar.second && m.b + m.size < br.second)
        todo.push_back({{m.a + m.size, ar.second}, {m.b + m.size, br.second}});
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const MatchingBlock& x, const MatchingBlock& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
    return blocks;
  }

  std::size_t matched_elements() const {
    std::size_t m = 0;
    for (const auto& blk : matching_blocks()) m += blk.size;
    return m;
  }

 private:
  std::span<const T> a_;
  std::span<const T> b_;
  std::unordered_map<T, std::vector<std::size_t>, Hash> b2j_;
};

template <typename T>
SimilarityScore similarity_ratio(std::span<const T> a, std::span<const T> b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) throw Error(ErrorKind::BothEmpty, kTextsimModule, "both sequences are empty");
  const std::size_t m = GestaltMatcher<T>(a, b).matched_elements();
  return {2.0 * static_cast<double>(m) / static_cast<double>(total), m, total};
}

inline SimilarityScore similarity_ratio(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return similarity_ratio<std::string>(std::span<const std::string>(a), std::span<const std::string>(b));
}

}  // namespace summswap
