#pragma once

// Summaries for original and replaced articles: the built-in Lead-3 baseline,
// external adapter processes (JSONL over stdin/stdout or HTTP), pairing, and
// an on-disk summary cache.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "summswap/corpus.hpp"
#include "summswap/entity_swap.hpp"
#include "summswap/error.hpp"
#include "summswap/subprocess.hpp"
#include "summswap/text.hpp"
#include "summswap/textsim.hpp"
#include "summswap/tokenizer.hpp"

namespace summswap {

inline constexpr std::string_view kSummarizersModule = "summarizers";

enum class Variant { Original, Replaced };

inline std::string_view to_string(Variant v) { return v == Variant::Original ? "original" : "replaced"; }

inline Variant parse_variant(std::string_view s) {
  if (s == "original") return Variant::Original;
  if (s == "replaced") return Variant::Replaced;
  throw Error(ErrorKind::ParseError, kSummarizersModule, "unknown variant '" + std::string(s) + "'");
}

struct SummaryRecord {
  std::string article_id;
  Variant variant = Variant::Original;
  std::string summary_text;
  std::size_t token_length = 0;
  std::string model_id;

  static SummaryRecord make(std::string article_id, Variant variant, std::string summary, std::string model_id) {
    SummaryRecord r{std::move(article_id), variant, std::move(summary), 0, std::move(model_id)};
    r.token_length = tokenize(r.summary_text).size();
    return r;
  }

  bool operator==(const SummaryRecord&) const = default;
};

inline nlohmann::ordered_json to_json(const SummaryRecord& r) {
  return {{"article_id", r.article_id}, {"variant", to_string(r.variant)}, {"model_id", r.model_id},
          {"summary", r.summary_text}, {"token_length", r.token_length}};
}

inline SummaryRecord record_from_json(const nlohmann::json& j) {
  for (const char* f : {"article_id", "variant", "model_id", "summary"})
    if (!j.contains(f) || !j[f].is_string())
      throw Error(ErrorKind::ParseError, kSummarizersModule, std::string("summary record lacks '") + f + "'");
  return SummaryRecord::make(j["article_id"].get<std::string>(), parse_variant(j["variant"].get<std::string>()),
                             j["summary"].get<std::string>(), j["model_id"].get<std::string>());
}

struct SummaryPair {
  std::string article_id;
  SummaryRecord original;
  SummaryRecord replaced;
  std::string replaced_backmapped;
};

inline nlohmann::ordered_json to_json(const SummaryPair& p) {
  return {{"article_id", p.article_id},
          {"model_id", p.original.model_id},
          {"original", p.original.summary_text},
          {"replaced", p.replaced.summary_text},
          {"replaced_backmapped", p.replaced_backmapped}};
}

struct AdapterConfig {
  std::vector<std::string> command;
  std::string model_id;
  double timeout_seconds = 300;
  std::size_t batch_size = 8;

  void validate() const {
    if (command.empty()) throw Error(ErrorKind::InvalidAdapterConfig, kSummarizersModule, "empty command");
    if (model_id.empty()) throw Error(ErrorKind::InvalidAdapterConfig, kSummarizersModule, "empty model_id");
    if (!(timeout_seconds > 0)) throw Error(ErrorKind::InvalidAdapterConfig, kSummarizersModule, "timeout must be > 0");
    if (batch_size < 1) throw Error(ErrorKind::InvalidAdapterConfig, kSummarizersModule, "batch_size must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Lead-3

/// Byte offsets just past each sentence terminator: '.', '!' or '?' followed
/// by whitespace and then an uppercase ASCII letter.
inline std::vector<std::size_t> sentence_ends(std::string_view s) {
  std::vector<std::size_t> ends;
  for (std::size_t i = 0; i + 2 < s.size(); ++i) {
    if (s[i] != '.' && s[i] != '!' && s[i] != '?') continue;
    std::size_t j = i + 1;
    if (!text::is_space(s[j])) continue;
    while (j < s.size() && text::is_space(s[j])) ++j;
    if (j < s.size() && text::is_ascii_upper(s[j])) ends.push_back(i + 1);
  }
  return ends;
}

inline std::string lead_sentences(std::string_view article_text, std::size_t count) {
  const std::string_view body = text::trim(article_text);
  const auto ends = sentence_ends(body);
  if (ends.size() < count) return std::string(body);
  return std::string(body.substr(0, ends[count - 1]));
}

inline SummaryRecord summarize_lead3(const Article& article, Variant variant = Variant::Original,
                                     std::string model_id = "lead3") {
  if (text::trim(article.text).empty())
    throw Error(ErrorKind::EmptyText, kSummarizersModule, "article '" + article.id + "' has no text");
  return SummaryRecord::make(article.id, variant, lead_sentences(article.text, 3), std::move(model_id));
}

// ---------------------------------------------------------------------------
// External adapters

namespace detail {

inline std::vector<std::string> adapter_requests(const std::vector<Article>& articles) {
  std::vector<std::string> lines;
  lines.reserve(articles.size());
  for (const auto& a : articles) {
    nlohmann::ordered_json req{{"id", a.id}, {"text", a.text}};
    lines.push_back(req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
  }
  return lines;
}

/// Matches response lines to requests by id; every id exactly once.
inline std::vector<SummaryRecord> match_responses(const std::vector<Article>& articles,
                                                  const std::vector<std::string>& lines, Variant variant,
                                                  const std::string& model_id) {
  std::map<std::string, std::optional<std::string>> answers;
  for (const auto& a : articles) answers[a.id];
  for (std::size_t i = 0; i < lines.size(); ++i) {
    nlohmann::json resp;
    try {
      resp = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::ParseError, kSummarizersModule, "response line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (!resp.is_object() || !resp.contains("id") || !resp["id"].is_string() || !resp.contains("summary") ||
        !resp["summary"].is_string())
      throw Error(ErrorKind::ParseError, kSummarizersModule,
                  "response line " + std::to_string(i + 1) + " lacks string fields id/summary");
    const auto id = resp["id"].get<std::string>();
    const auto it = answers.find(id);
    if (it == answers.end()) throw Error(ErrorKind::UnknownId, kSummarizersModule, "response for unrequested id '" + id + "'");
    if (it->second) throw Error(ErrorKind::UnknownId, kSummarizersModule, "id '" + id + "' answered twice");
    it->second = resp["summary"].get<std::string>();
  }
  std::vector<SummaryRecord> out;
  out.reserve(articles.size());
  for (const auto& a : articles) {
    const auto& ans = answers[a.id];
    if (!ans) throw Error(ErrorKind::MissingResponse, kSummarizersModule, "no response for id '" + a.id + "'");
    out.push_back(SummaryRecord::make(a.id, variant, *ans, model_id));
  }
  return out;
}

}  // namespace detail

/// Streams `{"id","text"}` lines to the adapter's stdin and reads
/// `{"id","summary"}` lines back. `timeout_seconds` bounds the wait for each
/// response; `batch_size` bounds requests in flight.
inline std::vector<SummaryRecord> run_external_adapter(const std::vector<Article>& articles, const AdapterConfig& config,
                                                       Variant variant = Variant::Original) {
  config.validate();
  if (articles.empty()) return {};
  const auto result = subprocess::exchange_lines(config.command, detail::adapter_requests(articles),
                                                 {config.batch_size, config.timeout_seconds});
  if (result.exit_code != 0)
    throw Error(ErrorKind::AdapterCrash, kSummarizersModule,
                "adapter '" + config.command.front() + "' exited with status " + std::to_string(result.exit_code));
  return detail::match_responses(articles, result.lines, variant, config.model_id);
}

/// Splits the articles into `jobs` contiguous batches, each served by its own
/// adapter process. Output follows input order.
inline std::vector<SummaryRecord> run_external_adapter_parallel(const std::vector<Article>& articles,
                                                                const AdapterConfig& config, Variant variant,
                                                                std::size_t jobs) {
  jobs = std::max<std::size_t>(1, std::min(jobs, articles.size()));
  if (jobs <= 1) return run_external_adapter(articles, config, variant);
  std::vector<std::future<std::vector<SummaryRecord>>> parts;
  const std::size_t chunk = (articles.size() + jobs - 1) / jobs;
  for (std::size_t b = 0; b < articles.size(); b += chunk) {
    std::vector<Article> slice(articles.begin() + static_cast<std::ptrdiff_t>(b),
                               articles.begin() + static_cast<std::ptrdiff_t>(std::min(articles.size(), b + chunk)));
    parts.push_back(std::async(std::launch::async, [slice = std::move(slice), &config, variant] {
      return run_external_adapter(slice, config, variant);
    }));
  }
  std::vector<SummaryRecord> out;
  for (auto& f : parts) {
    auto part = f.get();
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

/// Same protocol over HTTP: each batch of request lines is POSTed as one body
/// to `url`; the response body holds the JSONL answers.
inline std::vector<SummaryRecord> run_http_adapter(const std::vector<Article>& articles, const std::string& url,
                                                   const AdapterConfig& config, Variant variant = Variant::Original) {
  if (config.model_id.empty()) throw Error(ErrorKind::InvalidAdapterConfig, kSummarizersModule, "empty model_id");
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  httplib::Client client(base);
  const auto secs = static_cast<time_t>(config.timeout_seconds);
  const auto usecs = static_cast<time_t>((config.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_read_timeout(secs, usecs);
  client.set_connection_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const auto requests = detail::adapter_requests(articles);
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  std::vector<std::string> lines;
  for (std::size_t b = 0; b < requests.size(); b += batch) {
    std::string body;
    for (std::size_t i = b; i < std::min(requests.size(), b + batch); ++i) body += requests[i] + "\n";
    auto res = client.Post(path, body, "application/x-ndjson");
    if (!res) {
      const auto err = res.error();
      const auto kind = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout ? ErrorKind::AdapterTimeout
                                                                                                 : ErrorKind::AdapterCrash;
      throw Error(kind, kSummarizersModule, "HTTP adapter " + url + ": " + httplib::to_string(err));
    }
    if (res->status != 200)
      throw Error(ErrorKind::AdapterCrash, kSummarizersModule, "HTTP adapter " + url + " returned " + std::to_string(res->status));
    for (auto& l : text::split_lines(res->body))
      if (!text::trim(l).empty()) lines.push_back(std::move(l));
  }
  return detail::match_responses(articles, lines, variant, config.model_id);
}

// ---------------------------------------------------------------------------
// Pairing

struct PairingResult {
  std::vector<SummaryPair> pairs;     // ordered by article_id
  std::vector<std::string> orphans;   // ids present on one side only
};

inline PairingResult pair_summaries(const std::vector<SummaryRecord>& originals, const std::vector<SummaryRecord>& replaceds,
                                    const InverseMapping& inverse, bool case_insensitive_backreplace = false) {
  std::optional<std::string> model;
  auto check_model = [&](const SummaryRecord& r) {
    if (!model) model = r.model_id;
    else if (*model != r.model_id)
      throw Error(ErrorKind::ModelMismatch, kSummarizersModule, "'" + *model + "' vs '" + r.model_id + "'");
  };
  std::map<std::string, const SummaryRecord*> orig, repl;
  for (const auto& r : originals) {
    check_model(r);
    orig[r.article_id] = &r;
  }
  for (const auto& r : replaceds) {
    check_model(r);
    repl[r.article_id] = &r;
  }
  PairingResult out;
  for (const auto& [id, o] : orig) {
    const auto it = repl.find(id);
    if (it == repl.end()) {
      out.orphans.push_back(id);
      continue;
    }
    SummaryRecord original = *o, replaced = *it->second;
    original.variant = Variant::Original;
    replaced.variant = Variant::Replaced;
    auto back = back_replace(replaced.summary_text, inverse, case_insensitive_backreplace);
    out.pairs.push_back({id, std::move(original), std::move(replaced), std::move(back)});
  }
  for (const auto& [id, r] : repl)
    if (!orig.count(id)) out.orphans.push_back(id);
  std::sort(out.orphans.begin(), out.orphans.end());
  return out;
}

inline PairingResult pair_summaries(const std::vector<SummaryRecord>& originals, const std::vector<SummaryRecord>& replaceds,
                                    const EntityMapping& mapping, bool case_insensitive_backreplace = false) {
  return pair_summaries(originals, replaceds, invert_mapping(mapping), case_insensitive_backreplace);
}

/// Similarity of the original summary against the back-mapped replaced one
/// (or the raw replaced summary when `raw` is set). Original goes first.
inline SimilarityScore similarity_for_pair(const SummaryPair& pair, bool raw = false) {
  const auto a = tokenize(pair.original.summary_text).tokens;
  const auto b = tokenize(raw ? pair.replaced.summary_text : pair.replaced_backmapped).tokens;
  return similarity_ratio(a, b);
}

// ---------------------------------------------------------------------------
// Cache

/// Append-only JSONL store of SummaryRecords keyed by
/// (model_id, article_id, variant, mapping hash).
class SummaryCache {
 public:
  explicit SummaryCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (text::trim(line).empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        auto rec = record_from_json(j);
        const auto hash = j.value("mapping_hash", std::string());
        entries_[key(rec.model_id, rec.article_id, rec.variant, hash)] = std::move(rec);
      } catch (const std::exception&) {
        // A torn final line from an interrupted run is dropped.
      }
    }
  }

  std::optional<SummaryRecord> lookup(const std::string& model_id, const std::string& article_id, Variant variant,
                                      std::uint64_t mapping_hash) const {
    const auto it = entries_.find(key(model_id, article_id, variant, hash_string(mapping_hash)));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::vector<SummaryRecord>& records, std::uint64_t mapping_hash) {
    if (records.empty()) return;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, kSummarizersModule, "cannot append to " + path_.string());
    const auto hash = hash_string(mapping_hash);
    for (const auto& r : records) {
      auto j = to_json(r);
      j["mapping_hash"] = hash;
      out << j.dump() << '\n';
      entries_[key(r.model_id, r.article_id, r.variant, hash)] = r;
    }
  }

  std::size_t size() const noexcept { return entries_.size(); }

  static std::string hash_string(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

 private:
  using Key = std::tuple<std::string, std::string, Variant, std::string>;
  static Key key(const std::string& m, const std::string& a, Variant v, const std::string& h) { return {m, a, v, h}; }

  std::filesystem::path path_;
  std::map<Key, SummaryRecord> entries_;
};

}  // namespace summswap
