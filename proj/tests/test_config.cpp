#include "doctest.h"
#include "elrag/config.hpp"
#include "elrag/errors.hpp"
#include "test_support.hpp"

#include <fstream>

using namespace elrag;

namespace {

PipelineConfig toy_config() {
  return PipelineConfig::load(test_support::fixtures_dir() / "config_toy.json");
}

}  // namespace

TEST_CASE("config loads the bundled file with paper defaults intact") {
  PipelineConfig cfg = toy_config();
  CHECK(cfg.linker.alpha == 0.9);
  CHECK(cfg.rerank.beta == 0.5);
  CHECK(cfg.rerank.rrf_k == 60);
  CHECK(cfg.rerank.cross_top_n == 20);
  CHECK(cfg.embedding_dim == 256);
  CHECK(cfg.seed == 42);
  CHECK(cfg.resolved_pool_size() == 30);

  cfg.rerank.strategy = "rrf_cross";
  CHECK(cfg.resolved_pool_size() == 50);
  cfg.rerank.pool_size = 17;
  CHECK(cfg.resolved_pool_size() == 17);
}

TEST_CASE("defaults when sections are omitted") {
  test_support::TempDir dir("cfg");
  std::ofstream out(dir.path() / "minimal.json");
  out << R"({"corpus_path": "corpus.json"})";
  out.close();
  PipelineConfig cfg = PipelineConfig::load(dir.path() / "minimal.json");
  CHECK(cfg.embedding_dim == 1024);
  CHECK(cfg.linker.alpha == 0.9);
  CHECK(cfg.linker.max_candidates == 7);
  CHECK(cfg.linker.language == "it");
  CHECK(cfg.rerank.strategy == "rrf");
  CHECK(cfg.chunker.min_tokens == 20);
  CHECK(cfg.chunker.max_tokens == 300);
  CHECK(cfg.embedder_seed() == 42);
}

TEST_CASE("relative paths resolve against the config directory") {
  PipelineConfig cfg = toy_config();
  CHECK(cfg.resolve("gazetteer.txt") == test_support::fixtures_dir() / "gazetteer.txt");
  CHECK(cfg.resolve("/abs/path.json") == std::filesystem::path("/abs/path.json"));
}

TEST_CASE("validate_config reports every violation, not just the first") {
  PipelineConfig cfg = toy_config();
  cfg.linker.alpha = 1.5;
  cfg.rerank.beta = -1.0;
  cfg.rerank.strategy = "boh";
  cfg.rerank.pool_size = 10;
  cfg.rerank.cross_top_n = 20;
  auto violations = validate_config(cfg, ConfigNeeds{});
  CHECK(violations.size() >= 4);

  CHECK_THROWS_WITH_AS(require_valid_config(cfg, ConfigNeeds{}),
                       doctest::Contains("violations"), ConfigError);
}

TEST_CASE("validation checks referenced paths per command needs") {
  PipelineConfig cfg = toy_config();
  cfg.benchmark.path = "missing_benchmark.json";
  ConfigNeeds needs;
  needs.benchmark = true;
  auto violations = validate_config(cfg, needs);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("missing_benchmark.json") != std::string::npos);

  // the same config passes when the benchmark is not needed
  CHECK(validate_config(cfg, ConfigNeeds{}).empty());
}

TEST_CASE("the fingerprint is stable and input-sensitive") {
  PipelineConfig cfg = toy_config();
  std::string fp = cfg.fingerprint();
  CHECK(fp.size() == 16);
  CHECK(fp == toy_config().fingerprint());

  PipelineConfig changed = toy_config();
  changed.rerank.beta = 0.75;
  CHECK(changed.fingerprint() != fp);

  PipelineConfig reseeded = toy_config();
  reseeded.seed = 43;
  CHECK(reseeded.fingerprint() != fp);
}

TEST_CASE("the embedder seed follows the top-level seed unless pinned") {
  PipelineConfig cfg = toy_config();
  cfg.seed = 99;
  CHECK(cfg.embedder_seed() == 99);
  cfg.embedder.seed = 7;
  CHECK(cfg.embedder_seed() == 7);
}

TEST_CASE("malformed config files are config errors") {
  test_support::TempDir dir("cfg_bad");
  {
    std::ofstream out(dir.path() / "broken.json");
    out << "{";
  }
  CHECK_THROWS_AS(PipelineConfig::load(dir.path() / "broken.json"), ConfigError);
  {
    std::ofstream out(dir.path() / "typed.json");
    out << R"({"embedding_dim": "mille"})";
  }
  CHECK_THROWS_AS(PipelineConfig::load(dir.path() / "typed.json"), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::load(dir.path() / "absent.json"), ConfigError);
}
