#pragma once

#include <set>
#include <string>
#include <vector>

#include "elrag/corpus.hpp"
#include "elrag/dense_index.hpp"

namespace elrag {

/// A pool member carrying both retrieval signals: the dense score/rank from
/// the index and the entity score/rank computed within the pool, plus the
/// fused score and final rank the active strategy assigned.
struct ScoredCandidate {
  std::string chunk_id;
  double dense_score = 0.0;
  int dense_rank = 0;
  double entity_score = 0.0;  // in [0, 1]
  int entity_rank = 0;
  double fused_score = 0.0;
  int final_rank = 0;
};

enum class RerankStrategy { weighted, rrf, rrf_cross };

struct RerankConfig {
  RerankStrategy strategy = RerankStrategy::rrf;
  double beta = 0.5;      // weighted fusion: entity contribution
  int rrf_k = 60;         // rank-fusion smoothing constant
  int pool_size = 30;     // 50 for rrf_cross
  int cross_top_n = 20;   // candidates forwarded to the cross-scorer
};

/// Recall-oriented overlap of the query's entity set against a chunk's:
/// |Q ∩ C| / |Q| when Q is non-empty, else 0.
double entity_overlap(const std::set<std::string>& query_entities,
                      const std::set<std::string>& chunk_entities);

/// fused = dense_score + beta * entity_overlap; ordered by (fused desc,
/// dense_rank asc, chunk_id asc). A pool chunk_id missing from the corpus
/// raises DataError.
std::vector<ScoredCandidate> rerank_weighted(const std::vector<DenseHit>& pool,
                                             const std::set<std::string>& query_entities,
                                             const ChunkLookup& corpus, double beta);

/// Assigns entity ranks 1..n within the pool by (entity_score desc,
/// dense_rank asc, chunk_id asc). Requires entity_score already computed.
void assign_entity_ranks(std::vector<ScoredCandidate>& pool);

/// Reciprocal rank fusion of the dense and entity rankings (both 1-based):
/// fused = 1/(k + dense_rank) + 1/(k + entity_rank); ordered by (fused
/// desc, dense_rank asc, chunk_id asc).
std::vector<ScoredCandidate> rerank_rrf(const std::vector<DenseHit>& pool,
                                        const std::set<std::string>& query_entities,
                                        const ChunkLookup& corpus, int rrf_k);

/// Cross-scorer contract: reads the query and each passage jointly and
/// returns one relevance score per passage id. Lives out of process in live
/// mode; two deterministic stubs are bundled for tests.
class CrossScorer {
 public:
  struct Passage {
    std::string id;
    std::string text;
  };
  struct Scored {
    std::string id;
    double score = 0.0;
  };

  virtual ~CrossScorer() = default;
  virtual std::vector<Scored> score(const std::string& query,
                                    const std::vector<Passage>& passages) const = 0;
};

/// Scores passage i as -(i+1), so the incoming order is preserved exactly.
class OrderPreservingScorer final : public CrossScorer {
 public:
  std::vector<Scored> score(const std::string& query,
                            const std::vector<Passage>& passages) const override;
};

/// Scores each passage by the number of distinct query tokens it shares
/// (tokens lowercased, ASCII punctuation stripped at the edges).
class TokenOverlapScorer final : public CrossScorer {
 public:
  std::vector<Scored> score(const std::string& query,
                            const std::vector<Passage>& passages) const override;
};

/// Three-stage pipeline: RRF over the full pool, keep the top cross_top_n,
/// re-score each (query, chunk text) pair, and order by (scorer score desc,
/// RRF rank asc, chunk_id asc). Scorer failures propagate as hard errors;
/// there is no silent fallback to the RRF order.
std::vector<ScoredCandidate> rerank_rrf_cross(const std::vector<DenseHit>& pool,
                                              const std::string& query,
                                              const std::set<std::string>& query_entities,
                                              const ChunkLookup& corpus,
                                              const CrossScorer& scorer,
                                              const RerankConfig& cfg);

}  // namespace elrag
