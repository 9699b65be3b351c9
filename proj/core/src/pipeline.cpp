#include "elrag/pipeline.hpp"

#include <algorithm>

#include "elrag/errors.hpp"

namespace elrag {

std::string to_string(RerankStrategy strategy) {
  switch (strategy) {
    case RerankStrategy::weighted: return "weighted";
    case RerankStrategy::rrf: return "rrf";
    case RerankStrategy::rrf_cross: return "rrf_cross";
  }
  return "rrf";
}

RerankStrategy strategy_from_string(const std::string& value) {
  if (value == "weighted") return RerankStrategy::weighted;
  if (value == "rrf") return RerankStrategy::rrf;
  if (value == "rrf_cross") return RerankStrategy::rrf_cross;
  throw ConfigError("unknown rerank strategy \"" + value +
                    "\" (expected weighted, rrf, or rrf_cross)");
}

std::string Pipeline::strategy_name() const { return to_string(rerank.strategy); }

std::vector<DenseHit> Pipeline::dense_pool(const std::string& query) const {
  EmbeddingVector query_vec = embedder->embed(query);
  return index->search(query_vec, rerank.pool_size);
}

std::set<std::string> Pipeline::query_entities(const std::string& query) const {
  if (linker == nullptr) return {};
  return linker->link_query(query);
}

std::vector<ScoredCandidate> Pipeline::run_query(const std::string& query) const {
  std::vector<DenseHit> pool = dense_pool(query);
  std::set<std::string> entities = query_entities(query);
  switch (rerank.strategy) {
    case RerankStrategy::weighted:
      return rerank_weighted(pool, entities, lookup, rerank.beta);
    case RerankStrategy::rrf:
      return rerank_rrf(pool, entities, lookup, rerank.rrf_k);
    case RerankStrategy::rrf_cross:
      if (cross_scorer == nullptr) {
        throw ConfigError("strategy rrf_cross requires a cross-scorer");
      }
      return rerank_rrf_cross(pool, query, entities, lookup, *cross_scorer, rerank);
  }
  throw ConfigError("unhandled rerank strategy");
}

std::vector<ContextChunk> Pipeline::context_for(const std::vector<ScoredCandidate>& ranking,
                                                std::size_t max_n) const {
  std::vector<ContextChunk> context;
  const std::size_t take = std::min(max_n, ranking.size());
  context.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    auto it = lookup.find(ranking[i].chunk_id);
    if (it == lookup.end()) {
      throw DataError("ranked chunk not found in corpus: " + ranking[i].chunk_id);
    }
    context.push_back({it->first, it->second->text});
  }
  return context;
}

}  // namespace elrag
