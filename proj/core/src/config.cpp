#include "elrag/config.hpp"

#include <fstream>

#include "elrag/digest.hpp"
#include "elrag/errors.hpp"
#include "elrag/pipeline.hpp"
#include "json.hpp"

namespace elrag {

namespace {

template <typename T>
void read_into(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: wrong type for " + where + "." + key);
  }
}

template <typename T>
void read_optional(const nlohmann::json& obj, const char* key, std::optional<T>& out,
                   const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: wrong type for " + where + "." + key);
  }
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config JSON in " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must contain a JSON object");

  PipelineConfig cfg;
  cfg.config_dir = std::filesystem::absolute(path).parent_path();

  read_into(doc, "corpus_path", cfg.corpus_path, "$");
  read_into(doc, "linked_corpus_path", cfg.linked_corpus_path, "$");
  read_into(doc, "transcripts_dir", cfg.transcripts_dir, "$");
  read_into(doc, "output_dir", cfg.output_dir, "$");
  read_into(doc, "seed", cfg.seed, "$");
  read_into(doc, "embedding_dim", cfg.embedding_dim, "$");

  if (auto it = doc.find("embedder"); it != doc.end()) {
    read_into(*it, "kind", cfg.embedder.kind, "$.embedder");
    read_into(*it, "path", cfg.embedder.path, "$.embedder");
    read_optional(*it, "seed", cfg.embedder.seed, "$.embedder");
  }
  if (auto it = doc.find("chunker"); it != doc.end()) {
    read_into(*it, "min_tokens", cfg.chunker.min_tokens, "$.chunker");
    read_into(*it, "max_tokens", cfg.chunker.max_tokens, "$.chunker");
  }
  if (auto it = doc.find("linker"); it != doc.end()) {
    read_into(*it, "alpha", cfg.linker.alpha, "$.linker");
    read_into(*it, "max_candidates", cfg.linker.max_candidates, "$.linker");
    read_into(*it, "language", cfg.linker.language, "$.linker");
    read_into(*it, "mode", cfg.linker.mode, "$.linker");
    read_into(*it, "fixture_path", cfg.linker.fixture_path, "$.linker");
    read_into(*it, "gazetteer_path", cfg.linker.gazetteer_path, "$.linker");
    read_into(*it, "api_endpoint", cfg.linker.api_endpoint, "$.linker");
    read_into(*it, "max_retries", cfg.linker.max_retries, "$.linker");
    read_into(*it, "retry_backoff_ms", cfg.linker.retry_backoff_ms, "$.linker");
    read_into(*it, "requests_per_second", cfg.linker.requests_per_second, "$.linker");
    read_into(*it, "cache_dir", cfg.linker.cache_dir, "$.linker");
  }
  if (auto it = doc.find("rerank"); it != doc.end()) {
    read_into(*it, "strategy", cfg.rerank.strategy, "$.rerank");
    read_into(*it, "beta", cfg.rerank.beta, "$.rerank");
    read_into(*it, "rrf_k", cfg.rerank.rrf_k, "$.rerank");
    read_optional(*it, "pool_size", cfg.rerank.pool_size, "$.rerank");
    read_into(*it, "cross_top_n", cfg.rerank.cross_top_n, "$.rerank");
    read_into(*it, "cross_scorer", cfg.rerank.cross_scorer, "$.rerank");
    read_into(*it, "cross_scorer_url", cfg.rerank.cross_scorer_url, "$.rerank");
  }
  if (auto it = doc.find("generator"); it != doc.end()) {
    read_into(*it, "kind", cfg.generator.kind, "$.generator");
    read_into(*it, "url", cfg.generator.url, "$.generator");
    read_into(*it, "model", cfg.generator.model, "$.generator");
    read_into(*it, "api_key_env", cfg.generator.api_key_env, "$.generator");
    read_into(*it, "prompt_template", cfg.generator.prompt_template, "$.generator");
    read_into(*it, "audit_log", cfg.generator.audit_log, "$.generator");
    read_into(*it, "max_retries", cfg.generator.max_retries, "$.generator");
    read_into(*it, "retry_backoff_ms", cfg.generator.retry_backoff_ms, "$.generator");
  }
  if (auto it = doc.find("judge"); it != doc.end()) {
    read_into(*it, "kind", cfg.judge.kind, "$.judge");
    read_into(*it, "url", cfg.judge.url, "$.judge");
    read_into(*it, "model", cfg.judge.model, "$.judge");
    read_into(*it, "api_key_env", cfg.judge.api_key_env, "$.judge");
    if (auto c = it->find("constant"); c != it->end()) {
      if (!c->is_array() || c->size() != 3) {
        throw ConfigError("config: $.judge.constant must be [completeness, relevance, clarity]");
      }
      cfg.judge.constant_completeness = (*c)[0].get<int>();
      cfg.judge.constant_relevance = (*c)[1].get<int>();
      cfg.judge.constant_clarity = (*c)[2].get<int>();
    }
  }
  if (auto it = doc.find("benchmark"); it != doc.end()) {
    read_into(*it, "kind", cfg.benchmark.kind, "$.benchmark");
    read_into(*it, "path", cfg.benchmark.path, "$.benchmark");
  }
  return cfg;
}

std::filesystem::path PipelineConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || config_dir.empty()) return p;
  return config_dir / p;
}

std::string PipelineConfig::active_corpus_path() const {
  return linked_corpus_path.empty() ? corpus_path : linked_corpus_path;
}

RerankConfig PipelineConfig::rerank_config() const {
  RerankConfig rc;
  rc.strategy = strategy_from_string(rerank.strategy);
  rc.beta = rerank.beta;
  rc.rrf_k = rerank.rrf_k;
  rc.pool_size = resolved_pool_size();
  rc.cross_top_n = rerank.cross_top_n;
  return rc;
}

int PipelineConfig::resolved_pool_size() const {
  if (rerank.pool_size) return *rerank.pool_size;
  return rerank.strategy == "rrf_cross" ? 50 : 30;
}

LinkerConfig PipelineConfig::linker_config() const {
  LinkerConfig lc;
  lc.alpha = linker.alpha;
  lc.max_candidates = linker.max_candidates;
  lc.language = linker.language;
  lc.mode = linker.mode == "live" ? LinkerMode::live : LinkerMode::fixture;
  return lc;
}

std::uint64_t PipelineConfig::embedder_seed() const {
  return embedder.seed.value_or(seed);
}

std::string PipelineConfig::canonical_json() const {
  // nlohmann::json objects keep keys sorted, which gives the canonical form.
  nlohmann::json j{
      {"corpus_path", corpus_path},
      {"linked_corpus_path", linked_corpus_path},
      {"transcripts_dir", transcripts_dir},
      {"output_dir", output_dir},
      {"seed", seed},
      {"embedding_dim", embedding_dim},
      {"embedder",
       {{"kind", embedder.kind},
        {"path", embedder.path},
        {"seed", embedder_seed()}}},
      {"chunker", {{"min_tokens", chunker.min_tokens}, {"max_tokens", chunker.max_tokens}}},
      {"linker",
       {{"alpha", linker.alpha},
        {"max_candidates", linker.max_candidates},
        {"language", linker.language},
        {"mode", linker.mode},
        {"fixture_path", linker.fixture_path},
        {"gazetteer_path", linker.gazetteer_path},
        {"api_endpoint", linker.api_endpoint},
        {"max_retries", linker.max_retries},
        {"retry_backoff_ms", linker.retry_backoff_ms},
        {"requests_per_second", linker.requests_per_second},
        {"cache_dir", linker.cache_dir}}},
      {"rerank",
       {{"strategy", rerank.strategy},
        {"beta", rerank.beta},
        {"rrf_k", rerank.rrf_k},
        {"pool_size", resolved_pool_size()},
        {"cross_top_n", rerank.cross_top_n},
        {"cross_scorer", rerank.cross_scorer},
        {"cross_scorer_url", rerank.cross_scorer_url}}},
      {"generator",
       {{"kind", generator.kind},
        {"url", generator.url},
        {"model", generator.model},
        {"api_key_env", generator.api_key_env},
        {"prompt_template", generator.prompt_template},
        {"audit_log", generator.audit_log},
        {"max_retries", generator.max_retries},
        {"retry_backoff_ms", generator.retry_backoff_ms}}},
      {"judge",
       {{"kind", judge.kind},
        {"constant",
         {judge.constant_completeness, judge.constant_relevance, judge.constant_clarity}},
        {"url", judge.url},
        {"model", judge.model},
        {"api_key_env", judge.api_key_env}}},
      {"benchmark", {{"kind", benchmark.kind}, {"path", benchmark.path}}},
  };
  return j.dump();
}

std::string PipelineConfig::fingerprint() const { return sha256_hex16(canonical_json()); }

std::vector<std::string> validate_config(const PipelineConfig& cfg, const ConfigNeeds& needs) {
  std::vector<std::string> violations;
  auto check = [&](bool ok, const std::string& message) {
    if (!ok) violations.push_back(message);
  };
  auto check_file = [&](const std::string& raw, const std::string& what) {
    if (raw.empty()) {
      violations.push_back(what + " is not set");
    } else if (!std::filesystem::exists(cfg.resolve(raw))) {
      violations.push_back(what + " does not exist: " + cfg.resolve(raw).string());
    }
  };

  check(cfg.embedding_dim >= 1, "embedding_dim must be >= 1");
  check(cfg.embedder.kind == "test" || cfg.embedder.kind == "file",
        "embedder.kind must be \"test\" or \"file\"");
  check(cfg.chunker.min_tokens >= 1, "chunker.min_tokens must be >= 1");
  check(cfg.chunker.min_tokens <= cfg.chunker.max_tokens,
        "chunker.min_tokens must be <= chunker.max_tokens");
  check(cfg.linker.alpha >= 0.0 && cfg.linker.alpha <= 1.0, "linker.alpha must be in [0, 1]");
  check(cfg.linker.max_candidates >= 1, "linker.max_candidates must be >= 1");
  check(cfg.linker.mode == "fixture" || cfg.linker.mode == "live",
        "linker.mode must be \"fixture\" or \"live\"");
  check(cfg.linker.max_retries >= 0, "linker.max_retries must be >= 0");
  check(cfg.rerank.strategy == "weighted" || cfg.rerank.strategy == "rrf" ||
            cfg.rerank.strategy == "rrf_cross",
        "rerank.strategy must be weighted, rrf, or rrf_cross");
  check(cfg.rerank.beta >= 0.0, "rerank.beta must be >= 0");
  check(cfg.rerank.rrf_k >= 0, "rerank.rrf_k must be >= 0");
  check(cfg.resolved_pool_size() >= 1, "rerank.pool_size must be >= 1");
  check(cfg.rerank.cross_top_n >= 1, "rerank.cross_top_n must be >= 1");
  check(cfg.rerank.cross_top_n <= cfg.resolved_pool_size(),
        "rerank.cross_top_n must be <= rerank.pool_size");
  check(cfg.rerank.cross_scorer == "stub_order" || cfg.rerank.cross_scorer == "stub_overlap" ||
            cfg.rerank.cross_scorer == "http",
        "rerank.cross_scorer must be stub_order, stub_overlap, or http");
  if (cfg.rerank.strategy == "rrf_cross" && cfg.rerank.cross_scorer == "http") {
    check(!cfg.rerank.cross_scorer_url.empty(),
          "rerank.cross_scorer_url is required when cross_scorer is \"http\"");
  }
  check(cfg.generator.kind == "stub" || cfg.generator.kind == "http",
        "generator.kind must be \"stub\" or \"http\"");
  if (cfg.generator.kind == "http") {
    check(!cfg.generator.url.empty(), "generator.url is required when generator.kind is \"http\"");
  }
  check(cfg.judge.kind == "constant" || cfg.judge.kind == "http",
        "judge.kind must be \"constant\" or \"http\"");
  for (int v : {cfg.judge.constant_completeness, cfg.judge.constant_relevance,
                cfg.judge.constant_clarity}) {
    check(v >= 1 && v <= 10, "judge.constant values must be in [1, 10]");
  }
  check(cfg.benchmark.kind == "custom" || cfg.benchmark.kind == "squad",
        "benchmark.kind must be \"custom\" or \"squad\"");

  if (needs.transcripts) check_file(cfg.transcripts_dir, "transcripts_dir");
  if (needs.corpus_file) check_file(cfg.corpus_path, "corpus_path");
  if (needs.active_corpus) {
    check_file(cfg.active_corpus_path(),
               cfg.linked_corpus_path.empty() ? "corpus_path" : "linked_corpus_path");
  }
  if (needs.benchmark) check_file(cfg.benchmark.path, "benchmark.path");
  if (needs.prompt_template) check_file(cfg.generator.prompt_template, "generator.prompt_template");
  if (needs.linker_inputs) {
    check_file(cfg.linker.gazetteer_path, "linker.gazetteer_path");
    if (cfg.linker.mode == "fixture") {
      check_file(cfg.linker.fixture_path, "linker.fixture_path");
    }
  }
  if (needs.embedder_store && cfg.embedder.kind == "file") {
    check_file(cfg.embedder.path, "embedder.path");
  }
  return violations;
}

void require_valid_config(const PipelineConfig& cfg, const ConfigNeeds& needs) {
  std::vector<std::string> violations = validate_config(cfg, needs);
  if (violations.empty()) return;
  std::string message = "config validation failed (" + std::to_string(violations.size()) +
                        " violation" + (violations.size() == 1 ? "" : "s") + "): ";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i > 0) message += "; ";
    message += violations[i];
  }
  throw ConfigError(message);
}

}  // namespace elrag
