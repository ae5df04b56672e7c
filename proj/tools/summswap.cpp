// summswap command-line driver.
//
//   summswap run --config exp.toml [--jobs N] [--baseline DIR] [--seed S]
//   summswap validate --config exp.toml
//   summswap filter --corpus c.jsonl --include "Donald Trump" --exclude "Joe Biden" --out f.jsonl
//   summswap replace --mapping t2b.json < article.txt
//   summswap months --corpus c.jsonl
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "summswap/corpus.hpp"
#include "summswap/entity_swap.hpp"
#include "summswap/pipeline.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void print_validation(const summswap::ValidationResult& vr) {
  for (const auto& e : vr.errors) std::cerr << "error: " << e << '\n';
  std::cerr << vr.errors.size() << " validation error(s)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"summswap: entity-swap audits of summarization models"};
  app.require_subcommand(1);

  std::string config_path;
  summswap::RunOverrides ov;
  std::size_t jobs = 0;
  std::string baseline, out_dir, liwc, roster, adapter_http;
  std::uint64_t seed = 0;
  double fw_prior = 0;
  std::vector<std::string> lexicons;

  auto* run = app.add_subcommand("run", "run the full audit pipeline");
  run->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
  auto* o_jobs = run->add_option("--jobs", jobs, "parallel adapter workers")->check(CLI::PositiveNumber);
  auto* o_base = run->add_option("--baseline", baseline, "earlier run directory for drift annotations");
  auto* o_seed = run->add_option("--seed", seed, "seed for corpus subsampling");
  auto* o_out = run->add_option("--out-dir", out_dir, "output directory");
  auto* o_prior = run->add_option("--fw-prior", fw_prior, "Dirichlet prior per token for Fightin' Words");
  run->add_flag("--bonferroni", ov.bonferroni, "Bonferroni-adjust p-values");
  run->add_flag("--raw-similarity", ov.raw_similarity, "score similarity before back-replacement");
  run->add_flag("--ci-backreplace", ov.ci_backreplace, "back-replace case-insensitively");
  run->add_flag("--roster-lastname", ov.roster_lastname, "match roster entries by last name");
  run->add_option("--lexicon", lexicons, "word-list lexicon as name=path");
  auto* o_liwc = run->add_option("--liwc", liwc, "LIWC-style wildcard dictionary");
  auto* o_roster = run->add_option("--roster", roster, "politician roster JSON");
  auto* o_http = run->add_option("--adapter-http", adapter_http, "send adapter models to this HTTP endpoint");

  auto* validate = app.add_subcommand("validate", "check a config and every file it references");
  validate->add_option("--config", config_path, "experiment config")->required();

  std::string corpus_path, filter_out;
  std::vector<std::string> includes, excludes, keywords;
  std::size_t max_words = 0, min_mentions = 1;
  int year = 0;
  auto* filter = app.add_subcommand("filter", "select articles by entity mentions");
  filter->add_option("--corpus", corpus_path, "corpus JSONL")->required()->check(CLI::ExistingFile);
  filter->add_option("--include", includes, "surface forms that must appear")->required();
  filter->add_option("--exclude", excludes, "surface forms that must not appear");
  auto* o_max = filter->add_option("--max-words", max_words, "drop longer articles");
  filter->add_option("--min-mentions", min_mentions, "minimum include-form mentions");
  filter->add_option("--keyword", keywords, "topic keywords (any)");
  auto* o_year = filter->add_option("--year", year, "keep one publication year");
  filter->add_option("--out", filter_out, "output JSONL (default stdout)");

  std::string mapping_path;
  auto* replace = app.add_subcommand("replace", "swap entities in text read from stdin");
  replace->add_option("--mapping", mapping_path, "mapping JSON")->required()->check(CLI::ExistingFile);
  bool back = false, ci = false;
  replace->add_flag("--back", back, "apply the inverse mapping instead");
  replace->add_flag("--ci", ci, "case-insensitive back-replacement");

  auto* months = app.add_subcommand("months", "article counts per month");
  months->add_option("--corpus", corpus_path, "corpus JSONL")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    if (run->parsed() || validate->parsed()) {
      if (*o_jobs) ov.jobs = jobs;
      if (*o_base) ov.baseline_dir = baseline;
      if (*o_seed) ov.seed = seed;
      if (*o_out) ov.out_dir = out_dir;
      if (*o_prior) ov.fw_prior = fw_prior;
      if (*o_liwc) ov.liwc_path = liwc;
      if (*o_roster) ov.roster_path = roster;
      if (*o_http) ov.adapter_http = adapter_http;
      for (const auto& l : lexicons) {
        const auto eq = l.find('=');
        if (eq == std::string::npos || eq == 0) {
          std::cerr << "error: --lexicon expects name=path, got '" << l << "'\n";
          return kExitValidation;
        }
        ov.lexicons.emplace_back(l.substr(0, eq), l.substr(eq + 1));
      }
      const auto vr = summswap::validate_config(config_path, ov);
      if (!vr.ok()) {
        print_validation(vr);
        return kExitValidation;
      }
      if (validate->parsed()) {
        std::cout << "ok: " << vr.config->directions.size() << " direction(s), " << vr.config->models.size()
                  << " model(s)\n";
        return 0;
      }
      const auto result = summswap::run_pipeline(*vr.config);
      std::cout << summswap::render_markdown(result.table, result.drift);
      return 0;
    }

    if (filter->parsed()) {
      summswap::MentionFilter mf{includes, excludes, std::nullopt, min_mentions};
      if (*o_max) mf.max_words = max_words;
      auto g = summswap::filter_by_mentions(summswap::ingest_corpus(corpus_path), mf);
      if (!keywords.empty()) g = summswap::filter_by_keywords(g, keywords);
      if (*o_year) g = summswap::split_by_year(g, year);
      const auto out = summswap::serialize_corpus_jsonl(g);
      if (filter_out.empty()) std::cout << out;
      else summswap::text::write_file(filter_out, out, "cli");
      std::cerr << g.size() << " article(s) selected\n";
      return 0;
    }

    if (replace->parsed()) {
      const std::string input{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
      const auto mapping = summswap::load_mapping(mapping_path);
      if (back) {
        std::cout << summswap::back_replace(input, mapping, ci);
      } else {
        const auto r = summswap::replace_entities(input, mapping);
        std::cout << r.text;
        std::cerr << r.report.replaced_count << " replacement(s), " << r.report.residual_source_forms
                  << " residual source form(s)\n";
      }
      return 0;
    }

    if (months->parsed()) {
      std::cout << "year,month,count\n";
      for (const auto& [ym, n] : summswap::monthly_counts(summswap::ingest_corpus(corpus_path)))
        std::cout << ym.first << ',' << ym.second << ',' << n << '\n';
      return 0;
    }
  } catch (const summswap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
