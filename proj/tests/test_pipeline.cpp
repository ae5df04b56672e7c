#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "summswap/pipeline.hpp"

using namespace summswap;
namespace fs = std::filesystem;

namespace {

const std::string kData = SUMMSWAP_DATA_DIR;
const std::string kFixtures = SUMMSWAP_FIXTURE_DIR;
const std::string kDemoConfig = kData + "/../demo/lead3.toml";

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("summswap_pipe_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& body) {
  const auto path = dir / "run.toml";
  text::write_file(path.string(), body, "test");
  return path.string();
}

bool any_contains(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(), [&](const auto& e) { return e.find(needle) != std::string::npos; });
}

std::string slurp(const fs::path& p) { return text::read_file(p.string(), "test"); }

const std::string kDirections = "[direction.t2b]\nlabel = \"T->B\"\nmapping = \"" + kData +
                                "/mapping_trump_to_biden.json\"\ncorpus = \"" + kFixtures + "/planted_trump.jsonl\"\n";

}  // namespace

TEST(ValidateConfig, DemoConfigIsValid) {
  const auto vr = validate_config(kDemoConfig);
  ASSERT_TRUE(vr.ok()) << text::join(vr.errors, "\n");
  const auto& cfg = *vr.config;
  EXPECT_EQ(cfg.directions.size(), 2u);
  EXPECT_EQ(cfg.models.front().kind, ModelKind::Lead3);
  EXPECT_TRUE(cfg.models.front().extractive);
  EXPECT_EQ(cfg.lexicons.size(), 4u);
  EXPECT_TRUE(cfg.roster);
  EXPECT_TRUE(cfg.liwc);
  EXPECT_EQ(cfg.directions[0].include_forms, cfg.directions[0].mapping.source_forms());
}

TEST(ValidateConfig, ReportsEveryMissingFile) {
  const auto dir = temp_dir("missing");
  const auto path = write_config(dir, kDirections +
                                          "[model.a]\nkind = \"lead3\"\n"
                                          "[features]\nroster = \"nope_roster.json\"\n"
                                          "[lexicon.gone]\npath = \"nope_lexicon.txt\"\n");
  const auto vr = validate_config(path);
  EXPECT_FALSE(vr.ok());
  EXPECT_TRUE(any_contains(vr.errors, "nope_roster.json"));
  EXPECT_TRUE(any_contains(vr.errors, "nope_lexicon.txt"));
  fs::remove_all(dir);
}

TEST(ValidateConfig, MalformedRegexNamesLine) {
  const auto dir = temp_dir("regex");
  text::write_file((dir / "bad.txt").string(), "maybe\n(perhaps\n", "test");
  const auto path = write_config(dir, kDirections + "[model.a]\n[lexicon.hedges]\nkind = \"regex_list\"\npath = \"bad.txt\"\n");
  const auto vr = validate_config(path);
  EXPECT_FALSE(vr.ok());
  EXPECT_TRUE(any_contains(vr.errors, "line 2"));
  fs::remove_all(dir);
}

TEST(ValidateConfig, StructuralErrors) {
  const auto dir = temp_dir("struct");
  auto vr = validate_config(write_config(dir, kDirections));
  EXPECT_TRUE(any_contains(vr.errors, "model"));
  vr = validate_config(write_config(dir, "[model.a]\n"));
  EXPECT_TRUE(any_contains(vr.errors, "direction"));
  vr = validate_config(write_config(dir, kDirections + "[model.a]\nkind = \"adapter\"\ncommand = [\"/no/such/binary\"]\n"));
  EXPECT_TRUE(any_contains(vr.errors, "/no/such/binary"));
  vr = validate_config(write_config(dir, kDirections + "[model.a]\nbogus = 1\n"));
  EXPECT_TRUE(any_contains(vr.errors, "bogus"));
  vr = validate_config(write_config(dir, "fw_prior = 0\n" + kDirections + "[model.a]\n"));
  EXPECT_TRUE(any_contains(vr.errors, "fw_prior"));
  vr = validate_config((dir / "absent.toml").string());
  EXPECT_FALSE(vr.ok());
  fs::remove_all(dir);
}

TEST(ValidateConfig, OverridesApply) {
  RunOverrides ov;
  ov.jobs = 3;
  ov.out_dir = "/tmp/elsewhere";
  ov.fw_prior = 0.5;
  ov.bonferroni = true;
  const auto vr = validate_config(kDemoConfig, ov);
  ASSERT_TRUE(vr.ok());
  EXPECT_EQ(vr.config->jobs, 3u);
  EXPECT_EQ(vr.config->out_dir, "/tmp/elsewhere");
  EXPECT_EQ(vr.config->fw_prior, 0.5);
  EXPECT_TRUE(vr.config->bonferroni);
}

TEST(SelectArticles, SeededSampleIsDeterministic) {
  auto cfg = *validate_config(kDemoConfig).config;
  const auto& dir = cfg.directions.front();
  const auto corpus = ingest_corpus(dir.corpus_path);
  cfg.sample = 10;
  cfg.seed = 7;
  const auto a = select_articles(cfg, dir, corpus), b = select_articles(cfg, dir, corpus);
  EXPECT_EQ(a.articles, b.articles);
  EXPECT_EQ(a.size(), 10u);
  cfg.seed = 8;
  EXPECT_NE(select_articles(cfg, dir, corpus).articles, a.articles);
  cfg.sample.reset();
  cfg.year = 2020;
  for (const auto& art : select_articles(cfg, dir, corpus).articles) EXPECT_EQ(art.year(), 2020);
}

TEST(FeatureSpecs, RowOrder) {
  const auto cfg = *validate_config(kDemoConfig).config;
  const auto specs = build_feature_specs(cfg, cfg.directions.front());
  std::vector<std::string> names;
  for (const auto& s : specs) names.push_back(s.name);
  EXPECT_EQ(names.front(), "entity_mentions");
  EXPECT_EQ(names[1], "party_DEM");
  EXPECT_EQ(names[3], "roster_male");
  EXPECT_EQ(names.back(), "length");
  EXPECT_TRUE(specs.back().use_raw);
  EXPECT_NE(std::find(names.begin(), names.end(), "phrase:Vice President"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "lexicon:hedges"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "liwc:posemo"), names.end());
}

TEST(RunPipeline, Lead3EndToEndAndReproducible) {
  const auto dir = temp_dir("run");
  RunOverrides ov;
  ov.out_dir = (dir / "out").string();
  auto cfg = *validate_config(kDemoConfig, ov).config;
  std::ostringstream log;
  const auto start = std::chrono::steady_clock::now();
  const auto summary = run_pipeline(cfg, log);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(10));

  const fs::path out = cfg.out_dir;
  for (const char* f : {"battery.csv", "battery.md", "similarity_scores.csv", "manifest.json", "monthly_counts_t2b.csv",
                        "pairs_lead3_t2b.jsonl", "battery_lead3_b2t.csv", "hallucinations_lead3_t2b.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_FALSE(fs::exists(out / ".partial"));
  EXPECT_EQ(summary.table.columns.size(), 2u);
  // Lead-3 is extractive: back-mapped summaries equal the originals.
  for (const auto& row : summary.table.cells)
    for (const auto& cell : row) EXPECT_EQ(cell, "\xE2\x80\x94");

  const auto battery = slurp(out / "battery.csv"), manifest = slurp(out / "manifest.json"),
             scores = slurp(out / "similarity_scores.csv");
  run_pipeline(cfg, log);
  EXPECT_EQ(slurp(out / "battery.csv"), battery);
  EXPECT_EQ(slurp(out / "manifest.json"), manifest);
  EXPECT_EQ(slurp(out / "similarity_scores.csv"), scores);

  // A baseline equal to the run produces an all-"none" drift report.
  ov.baseline_dir = cfg.out_dir;
  ov.out_dir = (dir / "out2").string();
  const auto with_base = run_pipeline(*validate_config(kDemoConfig, ov).config, log);
  EXPECT_FALSE(with_base.drift.empty());
  for (const auto& d : with_base.drift) EXPECT_EQ(d.kind, DriftKind::None);
  EXPECT_TRUE(fs::exists(dir / "out2" / "drift.csv"));
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const auto dir = temp_dir("cli");
  const std::string cli = SUMMSWAP_CLI;
  const auto quiet = " >" + (dir / "stdout").string() + " 2>" + (dir / "stderr").string();
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " validate --config " + kDemoConfig + quiet).c_str())), 0);
  const auto bad = write_config(dir, "[model.a]\n");
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " validate --config " + bad + quiet).c_str())), 1);
  EXPECT_NE(slurp(dir / "stderr").find("direction"), std::string::npos);
  const auto mapping = kData + "/mapping_trump_to_biden.json";
  EXPECT_EQ(WEXITSTATUS(std::system(("echo 'Donald Trump spoke.' | " + cli + " replace --mapping " + mapping + quiet).c_str())), 0);
  EXPECT_EQ(slurp(dir / "stdout"), "Joe Biden spoke.\n");
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " months --corpus /no/such/file" + quiet).c_str())), 1);
  text::write_file((dir / "broken.jsonl").string(), "{\"id\": \"a\", \"date\": \"2020-99-01\", \"text\": \"x\"}\n", "test");
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " months --corpus " + (dir / "broken.jsonl").string() + quiet).c_str())), 2);
  EXPECT_NE(slurp(dir / "stderr").find("MalformedDate"), std::string::npos);
  fs::remove_all(dir);
}
