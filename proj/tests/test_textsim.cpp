#include <gtest/gtest.h>

#include <random>

#include "summswap/textsim.hpp"
#include "summswap/tokenizer.hpp"

using namespace summswap;

using Tokens = std::vector<std::string>;

TEST(Similarity, SpecExamples) {
  const Tokens x{"a", "b", "c"};
  EXPECT_EQ(similarity_ratio(x, x).value, 1.0);
  EXPECT_EQ(similarity_ratio(Tokens{"a", "b"}, Tokens{"c", "d"}).value, 0.0);
  const auto s = similarity_ratio(Tokens{"a", "b", "c", "d"}, Tokens{"b", "c", "d", "e"});
  EXPECT_EQ(s.matches, 3u);
  EXPECT_EQ(s.total, 8u);
  EXPECT_DOUBLE_EQ(s.value, 0.75);
}

TEST(Similarity, OneSideEmpty) {
  const auto s = similarity_ratio(Tokens{}, Tokens{"a"});
  EXPECT_EQ(s.value, 0.0);
  EXPECT_EQ(s.total, 1u);
}

TEST(Similarity, BothEmpty) {
  try {
    similarity_ratio(Tokens{}, Tokens{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BothEmpty);
  }
}

TEST(Similarity, TieBreakLeftmostInA) {
  // "x y" occurs twice in a; the first occurrence is used, leaving nothing on the left.
  const Tokens a{"x", "y", "q", "x", "y"}, b{"x", "y"};
  const GestaltMatcher<std::string> m{std::span<const std::string>(a), std::span<const std::string>(b)};
  const auto blk = m.find_longest_match(0, a.size(), 0, b.size());
  EXPECT_EQ(blk, (MatchingBlock{0, 0, 2}));
}

TEST(Similarity, TieBreakLeftmostInB) {
  const Tokens a{"x"}, b{"y", "x", "x"};
  const GestaltMatcher<std::string> m{std::span<const std::string>(a), std::span<const std::string>(b)};
  EXPECT_EQ(m.find_longest_match(0, 1, 0, 3), (MatchingBlock{0, 1, 1}));
}

TEST(Similarity, OrderSensitiveUnderTies) {
  // Gestalt is not symmetric in general; the canonical order is original first.
  const Tokens a{"a", "b", "c", "a"}, b{"c", "a", "b"};
  const auto ab = similarity_ratio(a, b), ba = similarity_ratio(b, a);
  EXPECT_GE(ab.value, 0.0);
  EXPECT_LE(ab.value, 1.0);
  EXPECT_GE(ba.value, 0.0);
}

TEST(Similarity, Properties) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    Tokens a(1 + rng() % 12), b(rng() % 12);
    for (auto& t : a) t = std::string(1, static_cast<char>('a' + rng() % 5));
    for (auto& t : b) t = std::string(1, static_cast<char>('a' + rng() % 5));
    const auto s = similarity_ratio(a, b);
    EXPECT_EQ(s.value, 2.0 * static_cast<double>(s.matches) / static_cast<double>(s.total));
    EXPECT_GE(s.value, 0.0);
    EXPECT_LE(s.value, 1.0);
    EXPECT_EQ(similarity_ratio(a, a).value, 1.0);
    EXPECT_EQ(s.value == 1.0, a == b);
    // Blocks are disjoint and increasing in both sequences.
    const GestaltMatcher<std::string> m{std::span<const std::string>(a), std::span<const std::string>(b)};
    const auto blocks = m.matching_blocks();
    for (std::size_t i = 1; i < blocks.size(); ++i) {
      EXPECT_LE(blocks[i - 1].a + blocks[i - 1].size, blocks[i].a);
      EXPECT_LE(blocks[i - 1].b + blocks[i - 1].size, blocks[i].b);
    }
  }
}

TEST(Similarity, WordTokensNotCharacters) {
  const auto a = tokenize("Donald Trump said the economy is strong.");
  const auto b = tokenize("Donald Trump said the economy is weak.");
  const auto s = similarity_ratio(a.tokens, b.tokens);
  EXPECT_EQ(s.total, 16u);
  EXPECT_EQ(s.matches, 7u);
}

TEST(Similarity, LongInputsStayFast) {
  Tokens a, b;
  for (int i = 0; i < 3000; ++i) {
    a.push_back("w" + std::to_string(i % 97));
    b.push_back("w" + std::to_string((i * 7) % 101));
  }
  const auto s = similarity_ratio(a, b);
  EXPECT_GT(s.matches, 0u);
}
