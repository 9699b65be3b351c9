#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elrag/entity_linking.hpp"
#include "elrag/reranking.hpp"

namespace elrag {

/// Pipeline configuration, loaded from one JSON file. Enum-valued fields
/// stay as raw strings here so validate() can report every violation in one
/// pass; typed accessors convert after validation. Relative paths resolve
/// against the config file's directory.
struct PipelineConfig {
  std::filesystem::path config_dir;  // set by load(); base for relative paths

  std::string corpus_path;
  std::string linked_corpus_path;  // optional; commands prefer it when set
  std::string transcripts_dir;     // input of the ingest command
  std::string output_dir = "out";
  std::uint64_t seed = 42;

  int embedding_dim = 1024;
  struct Embedder {
    std::string kind = "test";  // test | file
    std::string path;           // JSON-lines store (kind=file)
    std::optional<std::uint64_t> seed;  // defaults to the top-level seed
  } embedder;

  struct Chunker {
    int min_tokens = 20;
    int max_tokens = 300;
  } chunker;

  struct Linker {
    double alpha = 0.9;
    int max_candidates = 7;
    std::string language = "it";
    std::string mode = "fixture";  // fixture | live
    std::string fixture_path;
    std::string gazetteer_path;
    std::string api_endpoint = "https://www.wikidata.org/w/api.php";
    int max_retries = 3;
    int retry_backoff_ms = 250;
    double requests_per_second = 2.0;
    std::string cache_dir;  // optional response cache (live mode)
  } linker;

  struct Rerank {
    std::string strategy = "rrf";  // weighted | rrf | rrf_cross
    double beta = 0.5;
    int rrf_k = 60;
    std::optional<int> pool_size;  // defaults to 30, or 50 for rrf_cross
    int cross_top_n = 20;
    std::string cross_scorer = "stub_order";  // stub_order | stub_overlap | http
    std::string cross_scorer_url;
  } rerank;

  struct Generator {
    std::string kind = "stub";  // stub | http
    std::string url;
    std::string model;
    std::string api_key_env = "ELRAG_API_KEY";
    std::string prompt_template;
    std::string audit_log;  // optional JSON-lines exchange log
    int max_retries = 3;
    int retry_backoff_ms = 250;
  } generator;

  struct Judge {
    std::string kind = "constant";  // constant | http
    int constant_completeness = 7;
    int constant_relevance = 7;
    int constant_clarity = 7;
    std::string url;
    std::string model;
    std::string api_key_env = "ELRAG_API_KEY";
  } judge;

  struct Benchmark {
    std::string kind = "custom";  // custom | squad
    std::string path;
  } benchmark;

  static PipelineConfig load(const std::filesystem::path& path);

  /// Resolves a config-relative path string against config_dir.
  std::filesystem::path resolve(const std::string& path) const;

  /// The corpus file queries and evaluation read: linked_corpus_path when
  /// set, else corpus_path.
  std::string active_corpus_path() const;

  RerankConfig rerank_config() const;   // after validation
  LinkerConfig linker_config() const;
  std::uint64_t embedder_seed() const;
  int resolved_pool_size() const;

  /// Canonical JSON of every field (sorted keys, compact); the basis of the
  /// fingerprint, so it must not depend on the machine or the cwd.
  std::string canonical_json() const;

  /// First 16 hex digits of the SHA-256 of canonical_json(). Embedded in
  /// every artifact this configuration produces.
  std::string fingerprint() const;
};

/// Which inputs a command is about to touch; validation checks existence
/// only for those.
struct ConfigNeeds {
  bool transcripts = false;
  bool corpus_file = false;
  bool active_corpus = false;
  bool benchmark = false;
  bool prompt_template = false;
  bool linker_inputs = false;  // gazetteer + fixture/endpoint
  bool embedder_store = false;
};

/// Returns every violation found (ranges, enum values, missing files);
/// empty means the config is usable for the requested command.
std::vector<std::string> validate_config(const PipelineConfig& cfg, const ConfigNeeds& needs);

/// validate_config, then throws ConfigError listing all violations.
void require_valid_config(const PipelineConfig& cfg, const ConfigNeeds& needs);

}  // namespace elrag
