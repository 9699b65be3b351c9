// elrag — hybrid dense + entity-linked retrieval over chunked corpora.
//
// Subcommands: ingest, link, index, query, evaluate, compare, repl.
// One JSON config file drives everything; a few flags override it.
// Exit codes: 0 success, 2 config error, 3 data error, 4 transport error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "elrag/commands.hpp"
#include "elrag/errors.hpp"
#include "json.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<std::string> output_dir;
  bool live = false;
};

elrag::PipelineConfig load_with_overrides(const GlobalArgs& args) {
  elrag::PipelineConfig cfg = elrag::PipelineConfig::load(args.config_path);
  if (args.seed) {
    cfg.seed = *args.seed;
    cfg.embedder.seed.reset();  // the test embedder follows the top-level seed
  }
  if (args.strategy) cfg.rerank.strategy = *args.strategy;
  if (args.output_dir) cfg.output_dir = *args.output_dir;
  return cfg;
}

void print_ranking(const std::vector<elrag::ScoredCandidate>& ranking) {
  for (const auto& c : ranking) {
    std::printf("%3d  %-24s fused=%-12.6g dense=%-10.6g entity=%.3f\n", c.final_rank,
                c.chunk_id.c_str(), c.fused_score, c.dense_score, c.entity_score);
  }
}

void print_generation(const elrag::GenerationResult& result) {
  std::printf("\nanswer: %s\n", result.answer_text.c_str());
  if (result.abstained) {
    std::printf("abstained: yes\n");
  } else {
    std::printf("cited:");
    for (const auto& id : result.cited_chunk_ids) std::printf(" %s", id.c_str());
    std::printf("\n");
  }
  if (result.dropped_citations > 0) {
    std::printf("warning: %d citation(s) outside the context were dropped\n",
                result.dropped_citations);
  }
}

int run_repl(const elrag::PipelineConfig& cfg, bool live) {
  elrag::ConfigNeeds needs;
  needs.active_corpus = true;
  needs.linker_inputs = true;
  needs.embedder_store = true;
  elrag::require_valid_config(cfg, needs);

  elrag::PipelineAssembly assembly = elrag::build_pipeline(cfg, live);
  elrag::Pipeline pipeline = assembly.view();
  std::printf("loaded %zu chunks (strategy=%s); empty line exits\n", assembly.corpus.chunks.size(),
              pipeline.strategy_name().c_str());

  std::string line;
  while (true) {
    std::printf("query> ");
    std::fflush(stdout);
    if (!std::getline(std::cin, line) || line.empty()) break;
    try {
      auto ranking = pipeline.run_query(line);
      if (ranking.size() > 10) ranking.resize(10);
      print_ranking(ranking);
    } catch (const std::exception& e) {
      std::printf("error: %s\n", e.what());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid dense + entity-linked retrieval pipeline"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("-c,--config", args.config_path, "pipeline config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", args.seed, "override the config seed (threads to the test embedder)");
  app.add_option("--strategy", args.strategy, "override rerank.strategy (weighted|rrf|rrf_cross)");
  app.add_option("--output-dir", args.output_dir, "override the output directory");
  app.add_flag("--live", args.live, "allow live knowledge-base API calls");

  auto* ingest = app.add_subcommand("ingest", "chunk transcripts into a corpus file");
  auto* link = app.add_subcommand("link", "entity-link the corpus");
  auto* index = app.add_subcommand("index", "build and persist the dense index manifest");

  std::string query_text;
  int query_k = 10;
  bool query_generate = false;
  auto* query = app.add_subcommand("query", "run one query against the pipeline");
  query->add_option("query", query_text, "the query text")->required();
  query->add_option("-k,--top-k", query_k, "ranked ids to print (default 10)");
  query->add_flag("--generate", query_generate, "also run the generator over the ranking");

  int method = 1;
  auto* evaluate = app.add_subcommand("evaluate", "run one evaluation method over the benchmark");
  evaluate->add_option("-m,--method", method, "evaluation method: 1, 2, or 3")
      ->check(CLI::Range(1, 3));

  auto* compare = app.add_subcommand("compare", "method-1 table across all strategies");
  auto* repl = app.add_subcommand("repl", "interactive query loop");

  CLI11_PARSE(app, argc, argv);

  try {
    elrag::PipelineConfig cfg = load_with_overrides(args);
    if (ingest->parsed()) {
      auto path = elrag::cmd_ingest(cfg);
      std::printf("corpus written: %s\n", path.string().c_str());
    } else if (link->parsed()) {
      auto path = elrag::cmd_link(cfg, args.live);
      std::printf("linked corpus written: %s\n", path.string().c_str());
    } else if (index->parsed()) {
      auto path = elrag::cmd_index(cfg, args.live);
      std::printf("index manifest written: %s\n", path.string().c_str());
    } else if (query->parsed()) {
      auto out = elrag::cmd_query(cfg, query_text, query_k, query_generate, args.live);
      print_ranking(out.ranking);
      if (out.generation) print_generation(*out.generation);
    } else if (evaluate->parsed()) {
      auto out = elrag::cmd_evaluate(cfg, method, args.live);
      std::printf("%s\nreport written: %s\n", out.summary.c_str(),
                  out.report_path.string().c_str());
    } else if (compare->parsed()) {
      auto out = elrag::cmd_compare(cfg, args.live);
      std::printf("%s\nreport written: %s\n", out.table.c_str(),
                  out.report_path.string().c_str());
    } else if (repl->parsed()) {
      return run_repl(cfg, args.live);
    }
    return 0;
  } catch (const elrag::ConfigError& e) {
    std::cerr << nlohmann::json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const elrag::DataError& e) {
    std::cerr << nlohmann::json{{"error", "data"}, {"message", e.what()}}.dump() << '\n';
    return 3;
  } catch (const elrag::TransportError& e) {
    std::cerr << nlohmann::json{{"error", "transport"}, {"message", e.what()}}.dump() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}
