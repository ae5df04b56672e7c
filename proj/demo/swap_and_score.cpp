// Swaps Trump -> Biden in one article, "summarizes" both variants with Lead-3,
// back-replaces the second summary and prints their gestalt similarity.
//
//   swap_and_score data/mapping_trump_to_biden.json

#include <iostream>

#include "summswap/entity_swap.hpp"
#include "summswap/summarizers.hpp"
#include "summswap/textsim.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: swap_and_score <mapping.json>\n";
    return 1;
  }
  const auto mapping = summswap::load_mapping(argv[1], "T→B");
  const auto article = summswap::Article::make(
      "demo", *summswap::parse_iso_date("2020-10-01"),
      "Donald Trump held a rally in Ohio on Monday. Donald J. Trump spoke for an hour. "
      "Supporters of Trump's campaign waited outside. The Trumpian crowd cheered at the end.");

  const auto swapped = summswap::replace_entities(article.text, mapping);
  std::cout << "replaced: " << swapped.text << "\n"
            << "  (" << swapped.report.replaced_count << " replacements)\n";

  const auto original = summswap::summarize_lead3(article);
  const auto replaced = summswap::summarize_lead3(
      summswap::Article::make(article.id, article.date, swapped.text), summswap::Variant::Replaced);
  const auto backmapped = summswap::back_replace(replaced.summary_text, mapping);
  std::cout << "original summary:   " << original.summary_text << "\n"
            << "back-mapped summary: " << backmapped << "\n";

  const auto a = summswap::tokenize(original.summary_text), b = summswap::tokenize(backmapped);
  const auto s = summswap::similarity_ratio(a.tokens, b.tokens);
  std::cout << "similarity: " << s.value << " (" << s.matches << " of " << s.total << " tokens matched)\n";
  return 0;
}
