#pragma once

#include <string>
#include <vector>

#include "elrag/corpus.hpp"
#include "elrag/dense_index.hpp"
#include "elrag/entity_linking.hpp"
#include "elrag/generation.hpp"
#include "elrag/reranking.hpp"

namespace elrag {

/// Wires the retrieval stages together for one configuration. Owns nothing:
/// callers keep the corpus, index, providers and linker alive. A null
/// linker degrades every entity score to 0 (the query entity set is empty),
/// which reduces all strategies to the dense order.
struct Pipeline {
  const Corpus* corpus = nullptr;
  ChunkLookup lookup;
  const EmbeddingProvider* embedder = nullptr;
  const DenseIndex* index = nullptr;
  const EntityLinker* linker = nullptr;
  const CrossScorer* cross_scorer = nullptr;  // required for rrf_cross
  RerankConfig rerank;
  std::string prompt_template;
  std::string config_fingerprint;

  std::string strategy_name() const;

  /// Dense candidates for the configured pool size.
  std::vector<DenseHit> dense_pool(const std::string& query) const;

  /// The query's linked entity set (empty without a linker).
  std::set<std::string> query_entities(const std::string& query) const;

  /// Full strategy output: dense retrieval, entity scoring, and the
  /// configured fusion.
  std::vector<ScoredCandidate> run_query(const std::string& query) const;

  /// The top max_n candidates as generation context, in final-rank order.
  std::vector<ContextChunk> context_for(const std::vector<ScoredCandidate>& ranking,
                                        std::size_t max_n) const;
};

std::string to_string(RerankStrategy strategy);
RerankStrategy strategy_from_string(const std::string& value);

}  // namespace elrag
