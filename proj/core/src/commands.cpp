#include "elrag/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "elrag/chunker.hpp"
#include "elrag/digest.hpp"
#include "elrag/errors.hpp"
#include "elrag/http_clients.hpp"
#include "elrag/wikidata_client.hpp"
#include "json.hpp"

namespace elrag {

namespace {

std::unique_ptr<EmbeddingProvider> make_embedder(const PipelineConfig& cfg) {
  if (cfg.embedder.kind == "file") {
    return std::make_unique<FileEmbeddingStore>(
        FileEmbeddingStore::load(cfg.resolve(cfg.embedder.path), cfg.embedding_dim));
  }
  return std::make_unique<HashEmbedder>(cfg.embedding_dim, cfg.embedder_seed());
}

std::unique_ptr<CandidateSource> make_candidate_source(const PipelineConfig& cfg,
                                                       bool live_approved) {
  if (cfg.linker.mode == "live") {
    if (!live_approved) {
      throw ConfigError(
          "linker.mode is \"live\" but --live was not passed; live mode sends requests to the "
          "knowledge-base API. Re-run with --live to allow that, or set linker.mode to "
          "\"fixture\"");
    }
    WikidataClientOptions options;
    options.endpoint = cfg.linker.api_endpoint;
    options.max_retries = cfg.linker.max_retries;
    options.retry_backoff_ms = cfg.linker.retry_backoff_ms;
    options.requests_per_second = cfg.linker.requests_per_second;
    if (!cfg.linker.cache_dir.empty()) options.cache_dir = cfg.resolve(cfg.linker.cache_dir);
    return std::make_unique<WikidataClient>(std::move(options));
  }
  return std::make_unique<FixtureCandidateSource>(
      FixtureCandidateSource::load(cfg.resolve(cfg.linker.fixture_path)));
}

std::unique_ptr<CrossScorer> make_cross_scorer(const PipelineConfig& cfg) {
  if (cfg.rerank.cross_scorer == "http") {
    HttpEndpointOptions options;
    options.url = cfg.rerank.cross_scorer_url;
    return std::make_unique<HttpCrossScorer>(std::move(options));
  }
  if (cfg.rerank.cross_scorer == "stub_overlap") {
    return std::make_unique<TokenOverlapScorer>();
  }
  return std::make_unique<OrderPreservingScorer>();
}

std::filesystem::path ensure_output_dir(const PipelineConfig& cfg) {
  std::filesystem::path dir = cfg.resolve(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<TranscriptSegment> load_transcript_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open transcript file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed transcript JSON in " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("doc_id") || !doc.contains("segments")) {
    throw DataError("transcript file " + path.string() +
                    " must contain {\"doc_id\", \"segments\"}");
  }
  const std::string doc_id = doc["doc_id"].get<std::string>();
  std::vector<TranscriptSegment> segments;
  for (const auto& item : doc["segments"]) {
    TranscriptSegment segment;
    segment.doc_id = doc_id;
    segment.text = item.at("text").get<std::string>();
    segment.start_time = item.at("start_time").get<double>();
    segment.end_time = item.at("end_time").get<double>();
    if (segment.text.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw DataError("transcript " + path.string() + ": segment with empty text");
    }
    segments.push_back(std::move(segment));
  }
  return segments;
}

std::string format_metric(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

// Links chunks in parallel; each chunk is independent and the linker is
// const, so results land in their original slots and the output order is
// deterministic. The first failure aborts the whole run.
void link_corpus_in_place(const EntityLinker& linker, Corpus& corpus) {
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         std::max<std::size_t>(corpus.chunks.size(), 1));
  if (workers <= 1 || corpus.chunks.size() < 2) {
    for (auto& chunk : corpus.chunks) chunk = linker.link_chunk(std::move(chunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < corpus.chunks.size(); i = next.fetch_add(1)) {
      try {
        corpus.chunks[i] = linker.link_chunk(std::move(corpus.chunks[i]));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < workers; ++t) threads.emplace_back(worker);
  for (auto& thread : threads) thread.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

Pipeline PipelineAssembly::view() const {
  Pipeline p;
  p.corpus = &corpus;
  p.lookup = make_chunk_lookup(corpus);
  p.embedder = embedder.get();
  p.index = index ? &*index : nullptr;
  p.linker = linker.get();
  p.cross_scorer = cross_scorer.get();
  p.rerank = rerank;
  p.prompt_template = prompt_template;
  p.config_fingerprint = config_fingerprint;
  return p;
}

PipelineAssembly build_pipeline(const PipelineConfig& cfg, bool live_approved,
                                std::optional<Corpus> corpus_override) {
  PipelineAssembly assembly;
  assembly.config_fingerprint = cfg.fingerprint();
  assembly.rerank = cfg.rerank_config();
  assembly.embedder = make_embedder(cfg);

  assembly.mentions = std::make_unique<GazetteerMentionProvider>(
      GazetteerMentionProvider::load(cfg.resolve(cfg.linker.gazetteer_path)));
  assembly.candidates = make_candidate_source(cfg, live_approved);
  assembly.linker = std::make_unique<EntityLinker>(*assembly.mentions, *assembly.candidates,
                                                   *assembly.embedder, cfg.linker_config());

  if (corpus_override) {
    // Benchmark-supplied corpus (squad-style): entity-link it in memory so
    // the entity strategies see the same signal path as a linked corpus file.
    assembly.corpus = std::move(*corpus_override);
    link_corpus_in_place(*assembly.linker, assembly.corpus);
  } else {
    assembly.corpus = load_corpus(cfg.resolve(cfg.active_corpus_path()));
  }

  if (assembly.rerank.strategy == RerankStrategy::rrf_cross) {
    assembly.cross_scorer = make_cross_scorer(cfg);
  }
  assembly.index = DenseIndex::build(assembly.corpus, *assembly.embedder);

  if (!cfg.generator.prompt_template.empty()) {
    assembly.prompt_template = load_prompt_template(cfg.resolve(cfg.generator.prompt_template));
  }
  return assembly;
}

std::unique_ptr<GeneratorClient> make_generator(const PipelineConfig& cfg) {
  if (cfg.generator.kind == "http") {
    HttpGeneratorOptions options;
    options.endpoint.url = cfg.generator.url;
    options.endpoint.max_retries = cfg.generator.max_retries;
    options.endpoint.retry_backoff_ms = cfg.generator.retry_backoff_ms;
    options.model = cfg.generator.model;
    options.api_key_env = cfg.generator.api_key_env;
    if (!cfg.generator.audit_log.empty()) {
      options.audit_log = cfg.resolve(cfg.generator.audit_log);
    }
    return std::make_unique<HttpGeneratorClient>(std::move(options));
  }
  return std::make_unique<ExtractiveStubGenerator>();
}

std::unique_ptr<JudgeClient> make_judge(const PipelineConfig& cfg) {
  if (cfg.judge.kind == "http") {
    HttpGeneratorOptions options;
    options.endpoint.url = cfg.judge.url;
    options.model = cfg.judge.model;
    options.api_key_env = cfg.judge.api_key_env;
    return std::make_unique<HttpJudgeClient>(std::move(options));
  }
  return std::make_unique<ConstantJudge>(cfg.judge.constant_completeness,
                                         cfg.judge.constant_relevance,
                                         cfg.judge.constant_clarity);
}

std::filesystem::path cmd_ingest(const PipelineConfig& cfg) {
  ConfigNeeds needs;
  needs.transcripts = true;
  require_valid_config(cfg, needs);
  if (cfg.corpus_path.empty()) throw ConfigError("corpus_path is not set");

  std::vector<std::filesystem::path> files;
  for (const auto& entry :
       std::filesystem::directory_iterator(cfg.resolve(cfg.transcripts_dir))) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw DataError("no *.json transcripts in " + cfg.resolve(cfg.transcripts_dir).string());
  }

  std::vector<TranscriptSegment> segments;
  for (const auto& file : files) {
    auto file_segments = load_transcript_file(file);
    segments.insert(segments.end(), std::make_move_iterator(file_segments.begin()),
                    std::make_move_iterator(file_segments.end()));
  }

  ChunkerOptions options;
  options.min_tokens = cfg.chunker.min_tokens;
  options.max_tokens = cfg.chunker.max_tokens;

  Corpus corpus;
  corpus.chunks = chunk_transcript(segments, options);
  corpus.metadata["source"] = cfg.transcripts_dir;
  corpus.metadata["config_fingerprint"] = cfg.fingerprint();

  std::filesystem::path out = cfg.resolve(cfg.corpus_path);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  save_corpus(corpus, out);
  return out;
}

std::filesystem::path cmd_link(const PipelineConfig& cfg, bool live_approved) {
  ConfigNeeds needs;
  needs.corpus_file = true;
  needs.linker_inputs = true;
  require_valid_config(cfg, needs);

  auto embedder = make_embedder(cfg);
  auto mentions = GazetteerMentionProvider::load(cfg.resolve(cfg.linker.gazetteer_path));
  auto candidates = make_candidate_source(cfg, live_approved);
  EntityLinker linker(mentions, *candidates, *embedder, cfg.linker_config());

  Corpus corpus = load_corpus(cfg.resolve(cfg.corpus_path));
  link_corpus_in_place(linker, corpus);
  corpus.metadata["config_fingerprint"] = cfg.fingerprint();

  std::filesystem::path out = cfg.linked_corpus_path.empty()
                                  ? ensure_output_dir(cfg) / "corpus_linked.json"
                                  : cfg.resolve(cfg.linked_corpus_path);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  save_corpus(corpus, out);
  return out;
}

std::filesystem::path cmd_index(const PipelineConfig& cfg, bool live_approved) {
  ConfigNeeds needs;
  needs.active_corpus = true;
  needs.linker_inputs = true;
  needs.embedder_store = true;
  require_valid_config(cfg, needs);

  PipelineAssembly assembly = build_pipeline(cfg, live_approved);
  std::filesystem::path dir = ensure_output_dir(cfg) / "index";
  assembly.index->save(dir, assembly.config_fingerprint);
  return dir;
}

QueryOutput cmd_query(const PipelineConfig& cfg, const std::string& query, int top_k,
                      bool with_generation, bool live_approved) {
  ConfigNeeds needs;
  needs.active_corpus = true;
  needs.linker_inputs = true;
  needs.embedder_store = true;
  if (with_generation) needs.prompt_template = true;
  require_valid_config(cfg, needs);

  PipelineAssembly assembly = build_pipeline(cfg, live_approved);
  Pipeline pipeline = assembly.view();

  QueryOutput out;
  out.ranking = pipeline.run_query(query);
  if (top_k > 0 && static_cast<int>(out.ranking.size()) > top_k) {
    out.ranking.resize(static_cast<std::size_t>(top_k));
  }
  if (with_generation && !out.ranking.empty()) {
    std::vector<ContextChunk> context = pipeline.context_for(out.ranking, out.ranking.size());
    GenerationRequest request =
        make_generation_request(query, std::move(context), pipeline.prompt_template);
    auto generator = make_generator(cfg);
    out.generation = generate(request, *generator);
  }
  return out;
}

EvaluateOutput cmd_evaluate(const PipelineConfig& cfg, int method, bool live_approved) {
  if (method < 1 || method > 3) {
    throw ConfigError("evaluate: method must be 1, 2, or 3");
  }
  ConfigNeeds needs;
  needs.benchmark = true;
  needs.linker_inputs = true;
  needs.embedder_store = true;
  if (cfg.benchmark.kind != "squad") needs.active_corpus = true;
  if (method >= 2) needs.prompt_template = true;
  require_valid_config(cfg, needs);

  std::vector<BenchmarkRecord> records;
  std::optional<Corpus> corpus_override;
  if (cfg.benchmark.kind == "squad") {
    auto [corpus, squad_records] = load_squad_style(cfg.resolve(cfg.benchmark.path));
    corpus_override = std::move(corpus);
    records = std::move(squad_records);
  } else {
    records = load_custom_benchmark(cfg.resolve(cfg.benchmark.path));
  }

  PipelineAssembly assembly = build_pipeline(cfg, live_approved, std::move(corpus_override));
  Pipeline pipeline = assembly.view();
  std::filesystem::path out_dir = ensure_output_dir(cfg);
  const std::string strategy = pipeline.strategy_name();

  EvaluateOutput out;
  if (method == 1) {
    EvalReport report = run_method1(pipeline, records);
    out.report_path = out_dir / ("report_method1_" + strategy + ".json");
    report.save(out.report_path);
    out.summary = "method1 strategy=" + strategy + " n=" + std::to_string(report.n_queries) +
                  " em=" + format_metric(report.em) +
                  " mrr_gold=" + format_metric(report.mrr_gold) +
                  " mrr_rel_docs=" + format_metric(report.mrr_rel_docs);
  } else if (method == 3) {
    auto generator = make_generator(cfg);
    EvalReport report = run_method3(pipeline, records, *generator);
    out.report_path = out_dir / ("report_method3_" + strategy + ".json");
    report.save(out.report_path);
    out.summary = "method3 strategy=" + strategy + " n=" + std::to_string(report.n_queries) +
                  " em=" + format_metric(report.em) +
                  " recall=" + format_metric(report.recall_general.value_or(0.0)) +
                  " precision=" + format_metric(report.precision_general.value_or(0.0));
  } else {
    auto generator = make_generator(cfg);
    auto judge = make_judge(cfg);
    Method2Report report = run_method2(pipeline, records, *generator, *judge);
    out.report_path = out_dir / ("report_method2_" + strategy + ".json");
    std::ofstream file(out.report_path, std::ios::binary);
    if (!file) throw DataError("cannot write report: " + out.report_path.string());
    file << report.to_json_string();
    out.summary = "method2 strategy=" + strategy +
                  " completeness=" + format_metric(report.avg_completeness) +
                  " relevance=" + format_metric(report.avg_relevance) +
                  " clarity=" + format_metric(report.avg_clarity) +
                  " excluded=" + std::to_string(report.excluded);
  }
  return out;
}

CompareOutput cmd_compare(const PipelineConfig& cfg, bool live_approved) {
  ConfigNeeds needs;
  needs.benchmark = true;
  needs.linker_inputs = true;
  needs.embedder_store = true;
  if (cfg.benchmark.kind != "squad") needs.active_corpus = true;
  require_valid_config(cfg, needs);
  if (cfg.rerank.cross_scorer == "http" && cfg.rerank.cross_scorer_url.empty()) {
    throw ConfigError(
        "compare runs the rrf_cross strategy; rerank.cross_scorer_url is required when "
        "cross_scorer is \"http\"");
  }

  std::vector<BenchmarkRecord> records;
  std::optional<Corpus> corpus_override;
  if (cfg.benchmark.kind == "squad") {
    auto [corpus, squad_records] = load_squad_style(cfg.resolve(cfg.benchmark.path));
    corpus_override = std::move(corpus);
    records = std::move(squad_records);
  } else {
    records = load_custom_benchmark(cfg.resolve(cfg.benchmark.path));
  }

  // One assembly serves all strategies; only the rerank view changes.
  PipelineConfig base_cfg = cfg;
  base_cfg.rerank.strategy = "rrf_cross";  // forces the cross-scorer to exist
  PipelineAssembly assembly = build_pipeline(base_cfg, live_approved, std::move(corpus_override));

  struct Row {
    std::string label;
    EvalReport report;
  };
  std::vector<Row> rows;
  auto run_with = [&](const std::string& label, RerankStrategy strategy, double beta) {
    Pipeline pipeline = assembly.view();
    pipeline.config_fingerprint = cfg.fingerprint();
    pipeline.rerank.strategy = strategy;
    pipeline.rerank.beta = beta;
    pipeline.rerank.pool_size = cfg.rerank.pool_size.value_or(
        strategy == RerankStrategy::rrf_cross ? 50 : 30);
    EvalReport report = run_method1(pipeline, records);
    report.strategy = label;
    rows.push_back({label, std::move(report)});
  };
  // The dense baseline is weighted fusion with beta = 0, which provably
  // preserves the dense order.
  run_with("baseline", RerankStrategy::weighted, 0.0);
  run_with("weighted", RerankStrategy::weighted, cfg.rerank.beta);
  run_with("rrf", RerankStrategy::rrf, cfg.rerank.beta);
  run_with("rrf_cross", RerankStrategy::rrf_cross, cfg.rerank.beta);

  std::ostringstream table;
  table << "pipeline    EM     R@1    R@3    R@5    R@10   P@1    MRR_G  MRR_RD\n";
  nlohmann::ordered_json report_rows = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    const EvalReport& r = row.report;
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%-11s %-6.3f %-6.3f %-6.3f %-6.3f %-6.3f %-6.3f %-6.3f %-6.3f\n",
                  row.label.c_str(), r.em, r.recall_at.at(1), r.recall_at.at(3), r.recall_at.at(5),
                  r.recall_at.at(10), r.precision_at.at(1), r.mrr_gold, r.mrr_rel_docs);
    table << line;
    report_rows.push_back(nlohmann::ordered_json{
        {"pipeline", row.label},
        {"em", r.em},
        {"recall_at_1", r.recall_at.at(1)},
        {"recall_at_3", r.recall_at.at(3)},
        {"recall_at_5", r.recall_at.at(5)},
        {"recall_at_10", r.recall_at.at(10)},
        {"precision_at_1", r.precision_at.at(1)},
        {"mrr_gold", r.mrr_gold},
        {"mrr_rel_docs", r.mrr_rel_docs},
    });
  }

  CompareOutput out;
  out.table = table.str();
  out.report_path = ensure_output_dir(cfg) / "compare_method1.json";
  nlohmann::ordered_json doc{
      {"method", "method1"},
      {"config_fingerprint", cfg.fingerprint()},
      {"n_queries", records.size()},
      {"pipelines", std::move(report_rows)},
  };
  std::ofstream file(out.report_path, std::ios::binary);
  if (!file) throw DataError("cannot write report: " + out.report_path.string());
  file << doc.dump(2) << '\n';
  return out;
}

}  // namespace elrag
