#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "elrag/config.hpp"
#include "elrag/evaluation.hpp"
#include "elrag/pipeline.hpp"

namespace elrag {

/// Owning bundle behind a Pipeline view: everything a query needs, built
/// from one validated config. Move-only; the Pipeline returned by view()
/// borrows from this object.
struct PipelineAssembly {
  Corpus corpus;
  std::unique_ptr<EmbeddingProvider> embedder;
  std::unique_ptr<GazetteerMentionProvider> mentions;
  std::unique_ptr<CandidateSource> candidates;
  std::unique_ptr<EntityLinker> linker;
  std::unique_ptr<CrossScorer> cross_scorer;
  std::optional<DenseIndex> index;
  std::string prompt_template;
  std::string config_fingerprint;
  RerankConfig rerank;

  Pipeline view() const;
};

/// Builds the full retrieval stack from a config: corpus (linked file when
/// configured), embedder, index, linker, and cross-scorer. Live linker mode
/// requires live_approved (the CLI's --live flag); without it the build
/// refuses with guidance. When a squad-style benchmark corpus is passed in,
/// it replaces the corpus file and is entity-linked in memory.
PipelineAssembly build_pipeline(const PipelineConfig& cfg, bool live_approved = false,
                                std::optional<Corpus> corpus_override = std::nullopt);

std::unique_ptr<GeneratorClient> make_generator(const PipelineConfig& cfg);
std::unique_ptr<JudgeClient> make_judge(const PipelineConfig& cfg);

// --- CLI commands (thin wrappers in tools/ call these) ----------------------

/// Reads every *.json transcript in transcripts_dir, chunks it, and writes
/// the corpus to corpus_path. Returns the corpus file written.
std::filesystem::path cmd_ingest(const PipelineConfig& cfg);

/// Entity-links the corpus and writes the enriched file. Live mode needs
/// live_approved; fixture mode never touches the network.
std::filesystem::path cmd_link(const PipelineConfig& cfg, bool live_approved);

/// Builds the dense index and persists the manifest under output_dir/index.
std::filesystem::path cmd_index(const PipelineConfig& cfg, bool live_approved = false);

struct QueryOutput {
  std::vector<ScoredCandidate> ranking;
  std::optional<GenerationResult> generation;
};

/// One-shot query: final ranking truncated to top_k, plus the generated
/// answer when with_generation is set.
QueryOutput cmd_query(const PipelineConfig& cfg, const std::string& query, int top_k,
                      bool with_generation, bool live_approved = false);

struct EvaluateOutput {
  std::filesystem::path report_path;
  std::string summary;  // one-line human summary
};

/// Runs one evaluation method (1, 2, or 3) over the configured benchmark
/// and writes the report JSON under output_dir. Byte-identical given
/// identical inputs and seed.
EvaluateOutput cmd_evaluate(const PipelineConfig& cfg, int method, bool live_approved = false);

struct CompareOutput {
  std::filesystem::path report_path;
  std::string table;  // side-by-side text table over all strategies
};

/// Method-1 comparison of the dense baseline and all three strategies on
/// one benchmark, mirroring a results-table layout.
CompareOutput cmd_compare(const PipelineConfig& cfg, bool live_approved = false);

}  // namespace elrag
