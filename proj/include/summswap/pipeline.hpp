#pragma once

// End-to-end orchestration: ingest -> filter -> swap -> summarize both
// variants -> pair -> similarity -> features -> tests -> reports, for every
// configured model and replacement direction.

#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "summswap/config.hpp"
#include "summswap/corpus.hpp"
#include "summswap/entity_swap.hpp"
#include "summswap/error.hpp"
#include "summswap/features.hpp"
#include "summswap/report.hpp"
#include "summswap/stats.hpp"
#include "summswap/summarizers.hpp"
#include "summswap/text.hpp"

namespace summswap {

inline constexpr std::string_view kPipelineModule = "pipeline";

namespace fs = std::filesystem;

enum class ModelKind { Lead3, Adapter, Http };

struct ModelConfig {
  std::string id;
  ModelKind kind = ModelKind::Lead3;
  AdapterConfig adapter;  // command, timeout, batch size (Adapter/Http)
  std::string url;        // Http
  bool extractive = false;
};

struct DirectionConfig {
  std::string key;    // section suffix, used in file names
  std::string label;  // e.g. "T→B"
  std::string mapping_path;
  std::string corpus_path;
  std::vector<std::string> include_forms;  // default: mapping source forms
  std::vector<std::string> exclude_forms;  // default: mapping target forms
  std::vector<std::string> entity_forms;   // counted by entity_mentions; default: source forms
  EntityMapping mapping;
};

struct LexiconConfig {
  std::string name;
  LexiconKind kind = LexiconKind::WordList;
  std::string path;
};

struct RunConfig {
  std::string config_path;
  std::vector<DirectionConfig> directions;
  std::vector<ModelConfig> models;
  std::vector<LexiconConfig> lexicon_paths;
  std::optional<std::string> liwc_path;
  std::vector<std::string> liwc_categories;  // empty: every category in the file
  std::optional<std::string> roster_path;
  bool roster_lastname = false;
  std::vector<std::string> phrases{"Vice President", "administration"};
  std::vector<int> split_years;
  bool case_insensitive = false;  // party names and entity mentions
  bool ci_backreplace = false;
  bool raw_similarity = false;
  bool bonferroni = false;

  std::optional<std::size_t> max_words;
  std::vector<std::string> keywords;
  std::size_t min_mentions = 1;
  std::optional<int> year;
  std::optional<std::size_t> sample;

  double fw_prior = 0.01;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out_dir;
  std::string cache_dir;
  std::optional<std::string> baseline_dir;

  // Resources loaded during validation.
  std::vector<Lexicon> lexicons;
  std::optional<WildcardDict> liwc;
  std::optional<Roster> roster;
};

/// Command-line values that take precedence over the config file.
struct RunOverrides {
  std::optional<std::size_t> jobs;
  std::optional<std::string> baseline_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> fw_prior;
  bool bonferroni = false;
  bool raw_similarity = false;
  bool ci_backreplace = false;
  bool roster_lastname = false;
  std::vector<std::pair<std::string, std::string>> lexicons;  // name=path, word lists
  std::optional<std::string> liwc_path;
  std::optional<std::string> roster_path;
  std::optional<std::string> adapter_http;  // replaces every adapter model's transport
};

struct ValidationResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return config.has_value() && errors.empty(); }
};

namespace detail {

inline bool executable_exists(const std::string& cmd) {
  if (cmd.find('/') != std::string::npos) return ::access(cmd.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (path == nullptr) return false;
  std::string_view rest(path);
  while (true) {
    const auto colon = rest.find(':');
    const std::string dir(rest.substr(0, colon));
    if (!dir.empty() && ::access((dir + "/" + cmd).c_str(), X_OK) == 0) return true;
    if (colon == std::string_view::npos) return false;
    rest.remove_prefix(colon + 1);
  }
}

/// Reads typed values from a config section, recording every problem.
class SectionReader {
 public:
  SectionReader(const ConfigSection& s, std::vector<std::string>& errors) : s_(s), errors_(errors) {}

  std::string where(const std::string& key) const {
    return "[" + (s_.name.empty() ? std::string("root") : s_.name) + "] " + key;
  }

  bool has(const std::string& key) const { return s_.values.contains(key); }

  std::optional<std::string> str(const std::string& key, bool required = false) const {
    if (!has(key)) {
      if (required) errors_.push_back(where(key) + ": required");
      return std::nullopt;
    }
    if (!s_.values[key].is_string()) {
      errors_.push_back(where(key) + ": expected a string");
      return std::nullopt;
    }
    return s_.values[key].get<std::string>();
  }

  std::vector<std::string> strings(const std::string& key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    const auto& v = s_.values[key];
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_string(); })) {
      errors_.push_back(where(key) + ": expected an array of strings");
      return out;
    }
    for (const auto& e : v) out.push_back(e.template get<std::string>());
    return out;
  }

  std::vector<int> ints(const std::string& key) const {
    std::vector<int> out;
    if (!has(key)) return out;
    const auto& v = s_.values[key];
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_number_integer(); })) {
      errors_.push_back(where(key) + ": expected an array of integers");
      return out;
    }
    for (const auto& e : v) out.push_back(e.template get<int>());
    return out;
  }

  std::optional<double> number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    if (!s_.values[key].is_number()) {
      errors_.push_back(where(key) + ": expected a number");
      return std::nullopt;
    }
    return s_.values[key].get<double>();
  }

  std::optional<long long> integer(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    if (!s_.values[key].is_number_integer()) {
      errors_.push_back(where(key) + ": expected an integer");
      return std::nullopt;
    }
    return s_.values[key].get<long long>();
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!s_.values[key].is_boolean()) {
      errors_.push_back(where(key) + ": expected true or false");
      return fallback;
    }
    return s_.values[key].get<bool>();
  }

  void reject_unknown(std::initializer_list<std::string_view> known) const {
    for (const auto& [k, v] : s_.values.items())
      if (std::find(known.begin(), known.end(), k) == known.end()) errors_.push_back(where(k) + ": unknown key");
  }

 private:
  const ConfigSection& s_;
  std::vector<std::string>& errors_;
};

inline std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

inline std::optional<LexiconKind> parse_lexicon_kind(std::string_view s) {
  if (s == "word_list") return LexiconKind::WordList;
  if (s == "regex_list") return LexiconKind::RegexList;
  return std::nullopt;
}

}  // namespace detail

/// Parses and checks a config, loading every referenced resource. All
/// problems are reported, not just the first.
inline ValidationResult validate_config(const std::string& path, const RunOverrides& ov = {}) {
  ValidationResult vr;
  auto& errors = vr.errors;
  ConfigDoc doc;
  try {
    doc = parse_config(text::read_file(path, kConfigModule));
  } catch (const Error& e) {
    errors.push_back(e.what());
    return vr;
  }
  const fs::path base = fs::path(path).parent_path();
  RunConfig cfg;
  cfg.config_path = path;

  auto check_file = [&](const std::string& what, const std::string& p) {
    if (!fs::is_regular_file(p)) errors.push_back(what + ": file not found: " + p);
    return fs::is_regular_file(p);
  };

  // Root table.
  {
    detail::SectionReader r(doc.root(), errors);
    r.reject_unknown({"corpus", "out_dir", "cache_dir", "fw_prior", "seed", "jobs"});
    const auto corpus = r.str("corpus");
    cfg.out_dir = detail::resolve(base, r.str("out_dir").value_or("out"));
    if (const auto c = r.str("cache_dir")) cfg.cache_dir = detail::resolve(base, *c);
    if (const auto p = r.number("fw_prior")) cfg.fw_prior = *p;
    if (const auto s = r.integer("seed")) cfg.seed = static_cast<std::uint64_t>(*s);
    if (const auto j = r.integer("jobs")) cfg.jobs = static_cast<std::size_t>(std::max<long long>(1, *j));

    // Directions.
    for (const auto* sec : doc.with_prefix("direction")) {
      detail::SectionReader d(*sec, errors);
      d.reject_unknown({"label", "mapping", "corpus", "include", "exclude", "entity_forms"});
      DirectionConfig dir;
      dir.key = sec->name.substr(std::string("direction.").size());
      dir.label = d.str("label").value_or(dir.key);
      if (const auto m = d.str("mapping", true)) dir.mapping_path = detail::resolve(base, *m);
      const auto dc = d.str("corpus");
      if (dc) dir.corpus_path = detail::resolve(base, *dc);
      else if (corpus) dir.corpus_path = detail::resolve(base, *corpus);
      else errors.push_back(d.where("corpus") + ": no corpus for this direction and no root corpus");
      if (!dir.corpus_path.empty()) check_file(d.where("corpus"), dir.corpus_path);
      dir.include_forms = d.strings("include");
      dir.exclude_forms = d.strings("exclude");
      dir.entity_forms = d.strings("entity_forms");
      if (!dir.mapping_path.empty() && check_file(d.where("mapping"), dir.mapping_path)) {
        try {
          dir.mapping = load_mapping(dir.mapping_path, dir.label);
          invert_mapping(dir.mapping);
          if (dir.include_forms.empty()) dir.include_forms = dir.mapping.source_forms();
          if (dir.exclude_forms.empty() && !d.has("exclude")) dir.exclude_forms = dir.mapping.target_forms();
          if (dir.entity_forms.empty()) dir.entity_forms = dir.mapping.source_forms();
        } catch (const Error& e) {
          errors.push_back(d.where("mapping") + ": " + e.what());
        }
      }
      cfg.directions.push_back(std::move(dir));
    }
    if (cfg.directions.empty()) errors.push_back("no [direction.<name>] section");
  }

  // Models.
  for (const auto* sec : doc.with_prefix("model")) {
    detail::SectionReader m(*sec, errors);
    m.reject_unknown({"kind", "command", "url", "timeout", "batch_size", "extractive"});
    ModelConfig model;
    model.id = sec->name.substr(std::string("model.").size());
    const auto kind = m.str("kind").value_or("lead3");
    model.adapter.model_id = model.id;
    model.adapter.command = m.strings("command");
    if (const auto t = m.number("timeout")) model.adapter.timeout_seconds = *t;
    if (const auto b = m.integer("batch_size")) model.adapter.batch_size = static_cast<std::size_t>(std::max<long long>(0, *b));
    if (kind == "lead3") {
      model.kind = ModelKind::Lead3;
      model.extractive = m.flag("extractive", true);
    } else if (kind == "adapter" || kind == "http") {
      model.kind = kind == "adapter" ? ModelKind::Adapter : ModelKind::Http;
      model.extractive = m.flag("extractive", false);
      if (ov.adapter_http) {
        model.kind = ModelKind::Http;
        model.url = *ov.adapter_http;
      }
      if (model.kind == ModelKind::Http && model.url.empty()) model.url = m.str("url", true).value_or("");
      if (model.kind == ModelKind::Adapter) {
        if (model.adapter.command.empty()) {
          errors.push_back(m.where("command") + ": required for adapter models");
        } else {
          auto& exe = model.adapter.command.front();
          if (exe.find('/') != std::string::npos) exe = detail::resolve(base, exe);
          if (!detail::executable_exists(exe)) errors.push_back(m.where("command") + ": executable not found: " + exe);
        }
      }
      if (!(model.adapter.timeout_seconds > 0)) errors.push_back(m.where("timeout") + ": must be > 0");
      if (model.adapter.batch_size < 1) errors.push_back(m.where("batch_size") + ": must be >= 1");
    } else {
      errors.push_back(m.where("kind") + ": unknown model kind '" + kind + "'");
    }
    cfg.models.push_back(std::move(model));
  }
  if (cfg.models.empty()) errors.push_back("no [model.<id>] section");

  // Filters.
  if (const auto* sec = doc.find("filter")) {
    detail::SectionReader f(*sec, errors);
    f.reject_unknown({"max_words", "keywords", "min_mentions", "year", "sample", "split_years"});
    if (const auto mw = f.integer("max_words")) {
      if (*mw < 1) errors.push_back(f.where("max_words") + ": must be >= 1");
      else cfg.max_words = static_cast<std::size_t>(*mw);
    }
    cfg.keywords = f.strings("keywords");
    if (f.has("keywords") && cfg.keywords.empty()) errors.push_back(f.where("keywords") + ": must not be empty");
    if (const auto mm = f.integer("min_mentions")) cfg.min_mentions = static_cast<std::size_t>(std::max<long long>(0, *mm));
    if (const auto y = f.integer("year")) cfg.year = static_cast<int>(*y);
    if (const auto s = f.integer("sample")) {
      if (*s < 1) errors.push_back(f.where("sample") + ": must be >= 1");
      else cfg.sample = static_cast<std::size_t>(*s);
    }
    cfg.split_years = f.ints("split_years");
  }

  // Features and lexicons.
  if (const auto* sec = doc.find("features")) {
    detail::SectionReader f(*sec, errors);
    f.reject_unknown({"roster", "roster_lastname", "liwc", "liwc_categories", "phrases", "case_insensitive",
                      "ci_backreplace", "raw_similarity", "bonferroni"});
    if (const auto r = f.str("roster")) cfg.roster_path = detail::resolve(base, *r);
    cfg.roster_lastname = f.flag("roster_lastname", false);
    if (const auto l = f.str("liwc")) cfg.liwc_path = detail::resolve(base, *l);
    cfg.liwc_categories = f.strings("liwc_categories");
    if (f.has("phrases")) cfg.phrases = f.strings("phrases");
    cfg.case_insensitive = f.flag("case_insensitive", false);
    cfg.ci_backreplace = f.flag("ci_backreplace", false);
    cfg.raw_similarity = f.flag("raw_similarity", false);
    cfg.bonferroni = f.flag("bonferroni", false);
  }
  for (const auto* sec : doc.with_prefix("lexicon")) {
    detail::SectionReader l(*sec, errors);
    l.reject_unknown({"kind", "path"});
    LexiconConfig lc;
    lc.name = sec->name.substr(std::string("lexicon.").size());
    const auto kind = l.str("kind").value_or("word_list");
    if (const auto k = detail::parse_lexicon_kind(kind)) lc.kind = *k;
    else errors.push_back(l.where("kind") + ": unknown lexicon kind '" + kind + "'");
    if (const auto p = l.str("path", true)) lc.path = detail::resolve(base, *p);
    cfg.lexicon_paths.push_back(std::move(lc));
  }

  // Command-line overrides.
  if (ov.jobs) cfg.jobs = std::max<std::size_t>(1, *ov.jobs);
  if (ov.baseline_dir) cfg.baseline_dir = *ov.baseline_dir;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.fw_prior) cfg.fw_prior = *ov.fw_prior;
  cfg.bonferroni = cfg.bonferroni || ov.bonferroni;
  cfg.raw_similarity = cfg.raw_similarity || ov.raw_similarity;
  cfg.ci_backreplace = cfg.ci_backreplace || ov.ci_backreplace;
  cfg.roster_lastname = cfg.roster_lastname || ov.roster_lastname;
  for (const auto& [name, p] : ov.lexicons) {
    auto it = std::find_if(cfg.lexicon_paths.begin(), cfg.lexicon_paths.end(), [&](const auto& l) { return l.name == name; });
    if (it != cfg.lexicon_paths.end()) it->path = p;
    else cfg.lexicon_paths.push_back({name, LexiconKind::WordList, p});
  }
  if (ov.liwc_path) cfg.liwc_path = *ov.liwc_path;
  if (ov.roster_path) cfg.roster_path = *ov.roster_path;
  if (cfg.cache_dir.empty()) cfg.cache_dir = (fs::path(cfg.out_dir) / "cache").string();
  if (!(cfg.fw_prior > 0)) errors.push_back("fw_prior: must be > 0");
  if (cfg.baseline_dir && !fs::is_regular_file(fs::path(*cfg.baseline_dir) / "battery.csv"))
    errors.push_back("baseline: no battery.csv in " + *cfg.baseline_dir);

  // Load resources.
  for (const auto& lc : cfg.lexicon_paths) {
    if (lc.path.empty() || !check_file("lexicon '" + lc.name + "'", lc.path)) continue;
    try {
      cfg.lexicons.push_back(load_lexicon(lc.name, lc.kind, lc.path));
    } catch (const Error& e) {
      errors.push_back(lc.path + ": " + e.what());
    }
  }
  if (cfg.liwc_path && check_file("liwc", *cfg.liwc_path)) {
    try {
      cfg.liwc = load_wildcard_dict(*cfg.liwc_path);
      for (const auto& c : cfg.liwc_categories)
        if (!cfg.liwc->has(c)) errors.push_back("liwc_categories: unknown category '" + c + "'");
    } catch (const Error& e) {
      errors.push_back(*cfg.liwc_path + ": " + e.what());
    }
  }
  if (cfg.roster_path && check_file("roster", *cfg.roster_path)) {
    try {
      cfg.roster = load_roster(*cfg.roster_path);
    } catch (const Error& e) {
      errors.push_back(*cfg.roster_path + ": " + e.what());
    }
  }

  if (errors.empty()) vr.config = std::move(cfg);
  return vr;
}

// ---------------------------------------------------------------------------
// Running

/// The feature battery for one direction, in row order.
inline std::vector<FeatureSpec> build_feature_specs(const RunConfig& cfg, const DirectionConfig& dir) {
  std::vector<FeatureSpec> specs;
  const bool ci = cfg.case_insensitive;
  specs.push_back({"entity_mentions", [forms = dir.entity_forms, ci](const TokenSeq& t) {
                     return count_entity_mentions(t, forms, ci);
                   }});
  specs.push_back({"party_DEM", [ci](const TokenSeq& t) { return count_party_names(t, PartySide::Dem, ci); }});
  specs.push_back({"party_REP", [ci](const TokenSeq& t) { return count_party_names(t, PartySide::Rep, ci); }});
  if (cfg.roster) {
    std::vector<std::string> audited = dir.mapping.source_forms();
    for (const auto& t : dir.mapping.target_forms()) audited.push_back(t);
    const auto matcher = std::make_shared<RosterMatcher>(
        *cfg.roster, audited, cfg.roster_lastname ? RosterMatchMode::LastName : RosterMatchMode::FullName);
    for (RosterAttribute a : {RosterAttribute{Gender::Male}, RosterAttribute{Gender::Female},
                              RosterAttribute{Party::Democrat}, RosterAttribute{Party::Republican},
                              RosterAttribute{Party::Independent}})
      specs.push_back({"roster_" + attribute_name(a),
                       [matcher, a](const TokenSeq& t) { return count_roster_attribute(t, *matcher, a); }});
  }
  for (const auto& p : cfg.phrases)
    specs.push_back({"phrase:" + p, [p](const TokenSeq& t) { return count_phrase(t, p); }});
  for (const auto& lex : cfg.lexicons) {
    auto shared = std::make_shared<Lexicon>(lex);
    specs.push_back({"lexicon:" + lex.name, [shared](const TokenSeq& t) { return count_lexicon(t, *shared); }});
  }
  if (cfg.liwc) {
    auto dict = std::make_shared<WildcardDict>(*cfg.liwc);
    const auto& cats = cfg.liwc_categories.empty() ? cfg.liwc->categories : cfg.liwc_categories;
    for (const auto& c : cats)
      specs.push_back({"liwc:" + c, [dict, c](const TokenSeq& t) { return count_liwc_category(t, *dict, c); }});
  }
  specs.push_back({"length", [](const TokenSeq& t) { return summary_length(t); }, /*use_raw=*/true});
  return specs;
}

/// Applies the configured filters for one direction.
inline CorpusGroup select_articles(const RunConfig& cfg, const DirectionConfig& dir, const CorpusGroup& corpus) {
  MentionFilter mf{dir.include_forms, dir.exclude_forms, cfg.max_words, cfg.min_mentions};
  CorpusGroup g = filter_by_mentions(corpus, mf);
  g.label = dir.label;
  if (!cfg.keywords.empty()) g = filter_by_keywords(g, cfg.keywords);
  if (cfg.year) g = split_by_year(g, *cfg.year);
  if (cfg.sample && g.size() > *cfg.sample) {
    // Partial Fisher-Yates on raw engine output, reproducible across standard libraries.
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> idx(g.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < *cfg.sample; ++i) std::swap(idx[i], idx[i + rng() % (idx.size() - i)]);
    idx.resize(*cfg.sample);
    std::sort(idx.begin(), idx.end());
    std::vector<Article> picked;
    for (auto i : idx) picked.push_back(g.articles[i]);
    g.articles = std::move(picked);
  }
  std::sort(g.articles.begin(), g.articles.end(), [](const Article& a, const Article& b) { return a.id < b.id; });
  return g;
}

namespace detail {

inline std::vector<SummaryRecord> summarize_all(const ModelConfig& model, const std::vector<Article>& articles,
                                                Variant variant, std::size_t jobs) {
  switch (model.kind) {
    case ModelKind::Lead3: {
      std::vector<SummaryRecord> out;
      out.reserve(articles.size());
      for (const auto& a : articles) out.push_back(summarize_lead3(a, variant, model.id));
      return out;
    }
    case ModelKind::Adapter: return run_external_adapter_parallel(articles, model.adapter, variant, jobs);
    case ModelKind::Http: return run_http_adapter(articles, model.url, model.adapter, variant);
  }
  return {};
}

/// Cached summaries, computing and storing only the misses.
inline std::vector<SummaryRecord> summarize_cached(const ModelConfig& model, const std::vector<Article>& articles,
                                                   Variant variant, std::uint64_t mapping_hash, SummaryCache& cache,
                                                   std::size_t jobs) {
  std::vector<std::optional<SummaryRecord>> slots(articles.size());
  std::vector<Article> missing;
  std::vector<std::size_t> missing_idx;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    slots[i] = cache.lookup(model.id, articles[i].id, variant, mapping_hash);
    if (!slots[i]) {
      missing.push_back(articles[i]);
      missing_idx.push_back(i);
    }
  }
  if (!missing.empty()) {
    auto fresh = summarize_all(model, missing, variant, jobs);
    cache.store(fresh, mapping_hash);
    for (std::size_t k = 0; k < fresh.size(); ++k) slots[missing_idx[k]] = std::move(fresh[k]);
  }
  std::vector<SummaryRecord> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline std::string file_key(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace detail

struct RunSummary {
  std::vector<ResultGroup> groups;
  ReportTable table;
  std::vector<DriftAnnotation> drift;
};

/// Runs every model over every direction and writes all artifacts to
/// cfg.out_dir. A `.partial` marker stays behind if the run fails.
inline RunSummary run_pipeline(const RunConfig& cfg, std::ostream& log = std::cerr) {
  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  const fs::path partial = out / ".partial";
  text::write_file(partial.string(), "", kPipelineModule);

  std::map<std::string, CorpusGroup> corpora;
  SummaryCache cache(fs::path(cfg.cache_dir) / "summaries.jsonl");
  RunSummary summary;
  std::string similarity_csv = "model,direction,article_id,matches,total,similarity,original_tokens,replaced_tokens\n";
  nlohmann::ordered_json manifest;
  manifest["seed"] = cfg.seed;
  manifest["fw_prior"] = cfg.fw_prior;
  manifest["bonferroni"] = cfg.bonferroni;
  manifest["raw_similarity"] = cfg.raw_similarity;
  manifest["runs"] = nlohmann::ordered_json::array();

  for (const auto& dir : cfg.directions) {
    if (!corpora.count(dir.corpus_path)) corpora[dir.corpus_path] = ingest_corpus(dir.corpus_path);
    const CorpusGroup group = select_articles(cfg, dir, corpora.at(dir.corpus_path));
    const std::string dkey = detail::file_key(dir.key);
    log << "[" << dir.label << "] " << group.size() << " articles selected\n";

    std::string months = "year,month,count\n";
    for (const auto& [ym, n] : monthly_counts(group))
      months += std::to_string(ym.first) + "," + std::to_string(ym.second) + "," + std::to_string(n) + "\n";
    text::write_file((out / ("monthly_counts_" + dkey + ".csv")).string(), months, kPipelineModule);

    std::vector<Article> replaced_articles;
    std::size_t replaced_total = 0, residual_total = 0;
    for (const auto& a : group.articles) {
      auto r = replace_entities(a.text, dir.mapping);
      replaced_total += r.report.replaced_count;
      residual_total += r.report.residual_source_forms;
      replaced_articles.push_back(Article::make(a.id, a.date, std::move(r.text)));
    }
    const auto inverse = invert_mapping(dir.mapping);
    const auto mhash = mapping_hash(dir.mapping);
    std::map<std::string, const Article*> by_id, replaced_by_id;
    for (const auto& a : group.articles) by_id[a.id] = &a;
    for (const auto& a : replaced_articles) replaced_by_id[a.id] = &a;

    for (const auto& model : cfg.models) {
      const std::string mkey = detail::file_key(model.id) + "_" + dkey;
      nlohmann::ordered_json run{{"model", model.id}, {"direction", dir.label}, {"articles", group.size()},
                                 {"replacements", replaced_total}, {"residual_source_forms", residual_total}};
      auto originals = detail::summarize_cached(model, group.articles, Variant::Original, mhash, cache, cfg.jobs);
      auto replaceds = detail::summarize_cached(model, replaced_articles, Variant::Replaced, mhash, cache, cfg.jobs);
      const auto paired = pair_summaries(originals, replaceds, inverse, cfg.ci_backreplace);
      run["pairs"] = paired.pairs.size();
      run["orphans"] = paired.orphans;

      std::string pairs_jsonl, halluc = "article_id,variant,name\n";
      std::map<std::string, double> scores;
      for (const auto& p : paired.pairs) {
        auto j = to_json(p);
        const auto ta = tokenize(p.original.summary_text);
        const auto tb = tokenize(cfg.raw_similarity ? p.replaced.summary_text : p.replaced_backmapped);
        if (ta.size() + tb.size() > 0) {
          const auto s = similarity_for_pair(p, cfg.raw_similarity);
          scores[p.article_id] = s.value;
          j["similarity"] = s.value;
          similarity_csv += text::csv_field(model.id) + "," + text::csv_field(dir.label) + "," +
                            text::csv_field(p.article_id) + "," + std::to_string(s.matches) + "," +
                            std::to_string(s.total) + "," + format_number(s.value) + "," +
                            std::to_string(p.original.token_length) + "," + std::to_string(p.replaced.token_length) + "\n";
        }
        pairs_jsonl += j.dump() + "\n";
        for (const auto& name : detect_hallucinated_names(ta, tokenize(by_id.at(p.article_id)->text)))
          halluc += text::csv_field(p.article_id) + ",original," + text::csv_field(name) + "\n";
        for (const auto& name :
             detect_hallucinated_names(tokenize(p.replaced.summary_text), tokenize(replaced_by_id.at(p.article_id)->text)))
          halluc += text::csv_field(p.article_id) + ",replaced," + text::csv_field(name) + "\n";
      }
      text::write_file((out / ("pairs_" + mkey + ".jsonl")).string(), pairs_jsonl, kPipelineModule);
      text::write_file((out / ("hallucinations_" + mkey + ".csv")).string(), halluc, kPipelineModule);

      // Feature battery, plus year-restricted phrase rows when configured.
      const auto specs = build_feature_specs(cfg, dir);
      const BatteryOptions opts{cfg.bonferroni, 0.05};
      std::vector<TestResult> results;
      if (!paired.pairs.empty()) {
        results = run_feature_battery(paired.pairs, specs, opts);
      } else {
        for (const auto& s : specs) results.push_back({s.name, 0.0, 1.0, Direction::None, std::string(kNoTier), 0, false, "no pairs"});
      }
      for (int year : cfg.split_years) {
        std::vector<SummaryPair> subset;
        for (const auto& p : paired.pairs)
          if (by_id.at(p.article_id)->year() == year) subset.push_back(p);
        for (const auto& phrase : cfg.phrases) {
          const std::string name = "phrase:" + phrase + "@" + std::to_string(year);
          FeatureSpec spec{name, [phrase](const TokenSeq& t) { return count_phrase(t, phrase); }};
          if (subset.empty()) {
            results.push_back({name, 0.0, 1.0, Direction::None, std::string(kNoTier), 0, false, "no pairs"});
          } else {
            auto r = run_feature_battery(subset, {spec}, opts);
            results.push_back(std::move(r.front()));
          }
        }
      }
      text::write_file((out / ("battery_" + mkey + ".csv")).string(), results_to_csv(results), kPipelineModule);
      summary.groups.push_back({model.id, dir.label, results});

      // HighSim/LowSim split and Fightin' Words.
      try {
        const auto split = percentile_split(scores, model.extractive);
        run["p25"] = split.p25;
        run["p75"] = split.p75;
        run["high_sim"] = split.high_sim.size();
        run["low_sim"] = split.low_sim.size();
        run["degenerate_split"] = split.degenerate;
        std::vector<std::string> high_texts, low_texts;
        for (const auto& id : split.high_sim) high_texts.push_back(by_id.at(id)->text);
        for (const auto& id : split.low_sim) low_texts.push_back(by_id.at(id)->text);
        const auto fw = fightin_words(count_tokens(high_texts), count_tokens(low_texts), cfg.fw_prior);
        text::write_file((out / ("fightin_words_" + mkey + "_highsim.csv")).string(), fightin_words_to_csv(fw), kPipelineModule);
        const auto fw_low = fightin_words(count_tokens(low_texts), count_tokens(high_texts), cfg.fw_prior);
        text::write_file((out / ("fightin_words_" + mkey + "_lowsim.csv")).string(), fightin_words_to_csv(fw_low), kPipelineModule);
      } catch (const Error& e) {
        run["split_note"] = e.what();
        log << "[" << dir.label << "/" << model.id << "] similarity split skipped: " << e.what() << "\n";
      }
      try {
        std::vector<std::string> orig_texts, repl_texts;
        for (const auto& p : paired.pairs) {
          orig_texts.push_back(p.original.summary_text);
          repl_texts.push_back(p.replaced_backmapped);
        }
        const auto fw = fightin_words(count_tokens(orig_texts), count_tokens(repl_texts), cfg.fw_prior);
        text::write_file((out / ("fightin_words_" + mkey + "_summaries.csv")).string(), fightin_words_to_csv(fw), kPipelineModule);
      } catch (const Error& e) {
        run["summaries_fw_note"] = e.what();
      }
      manifest["runs"].push_back(std::move(run));
    }
  }

  summary.table = build_table(summary.groups);
  export_csv(summary.table, (out / "battery.csv").string());
  text::write_file((out / "similarity_scores.csv").string(), similarity_csv, kPipelineModule);
  if (cfg.baseline_dir) {
    const auto baseline = load_table_csv((fs::path(*cfg.baseline_dir) / "battery.csv").string());
    summary.drift = compare_tables(baseline, summary.table);
    text::write_file((out / "drift.csv").string(), drift_to_csv(baseline, summary.table, summary.drift), kPipelineModule);
  }
  text::write_file((out / "battery.md").string(), render_markdown(summary.table, summary.drift), kPipelineModule);
  text::write_file((out / "manifest.json").string(), manifest.dump(2) + "\n", kPipelineModule);
  fs::remove(partial);
  return summary;
}

}  // namespace summswap
