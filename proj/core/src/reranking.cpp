#include "elrag/reranking.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "elrag/entity_linking.hpp"
#include "elrag/errors.hpp"
#include "elrag/text.hpp"

namespace elrag {

namespace {

// Pool members with entity scores filled in, in dense order.
std::vector<ScoredCandidate> score_pool_entities(const std::vector<DenseHit>& pool,
                                                 const std::set<std::string>& query_entities,
                                                 const ChunkLookup& corpus) {
  std::vector<ScoredCandidate> out;
  out.reserve(pool.size());
  for (const auto& hit : pool) {
    auto it = corpus.find(hit.chunk_id);
    if (it == corpus.end()) {
      throw DataError("pool chunk not found in corpus: " + hit.chunk_id);
    }
    ScoredCandidate c;
    c.chunk_id = hit.chunk_id;
    c.dense_score = hit.dense_score;
    c.dense_rank = hit.dense_rank;
    c.entity_score = entity_overlap(query_entities, chunk_entity_ids(*it->second));
    out.push_back(std::move(c));
  }
  return out;
}

void finalize_order(std::vector<ScoredCandidate>& pool) {
  std::sort(pool.begin(), pool.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
    if (a.dense_rank != b.dense_rank) return a.dense_rank < b.dense_rank;
    return a.chunk_id < b.chunk_id;
  });
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].final_rank = static_cast<int>(i + 1);
  }
}

std::string normalize_token(const std::string& token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  auto is_ascii_punct = [](unsigned char c) {
    return c < 0x80 && !std::isalnum(c);
  };
  while (begin < end && is_ascii_punct(static_cast<unsigned char>(token[begin]))) ++begin;
  while (end > begin && is_ascii_punct(static_cast<unsigned char>(token[end - 1]))) --end;
  return ascii_lower(token.substr(begin, end - begin));
}

}  // namespace

double entity_overlap(const std::set<std::string>& query_entities,
                      const std::set<std::string>& chunk_entities) {
  if (query_entities.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& qid : query_entities) {
    if (chunk_entities.count(qid) > 0) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(query_entities.size());
}

std::vector<ScoredCandidate> rerank_weighted(const std::vector<DenseHit>& pool,
                                             const std::set<std::string>& query_entities,
                                             const ChunkLookup& corpus, double beta) {
  std::vector<ScoredCandidate> candidates = score_pool_entities(pool, query_entities, corpus);
  assign_entity_ranks(candidates);
  for (auto& c : candidates) {
    c.fused_score = c.dense_score + beta * c.entity_score;
  }
  finalize_order(candidates);
  return candidates;
}

void assign_entity_ranks(std::vector<ScoredCandidate>& pool) {
  std::vector<ScoredCandidate*> order;
  order.reserve(pool.size());
  for (auto& c : pool) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const ScoredCandidate* a, const ScoredCandidate* b) {
    if (a->entity_score != b->entity_score) return a->entity_score > b->entity_score;
    if (a->dense_rank != b->dense_rank) return a->dense_rank < b->dense_rank;
    return a->chunk_id < b->chunk_id;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i]->entity_rank = static_cast<int>(i + 1);
  }
}

std::vector<ScoredCandidate> rerank_rrf(const std::vector<DenseHit>& pool,
                                        const std::set<std::string>& query_entities,
                                        const ChunkLookup& corpus, int rrf_k) {
  std::vector<ScoredCandidate> candidates = score_pool_entities(pool, query_entities, corpus);
  assign_entity_ranks(candidates);
  for (auto& c : candidates) {
    c.fused_score = 1.0 / (rrf_k + c.dense_rank) + 1.0 / (rrf_k + c.entity_rank);
  }
  finalize_order(candidates);
  return candidates;
}

std::vector<CrossScorer::Scored> OrderPreservingScorer::score(
    const std::string&, const std::vector<Passage>& passages) const {
  std::vector<Scored> out;
  out.reserve(passages.size());
  for (std::size_t i = 0; i < passages.size(); ++i) {
    out.push_back({passages[i].id, -static_cast<double>(i + 1)});
  }
  return out;
}

std::vector<CrossScorer::Scored> TokenOverlapScorer::score(
    const std::string& query, const std::vector<Passage>& passages) const {
  std::unordered_set<std::string> query_tokens;
  for (const auto& token : whitespace_tokens(query)) {
    std::string norm = normalize_token(token);
    if (!norm.empty()) query_tokens.insert(std::move(norm));
  }
  std::vector<Scored> out;
  out.reserve(passages.size());
  for (const auto& passage : passages) {
    std::unordered_set<std::string> seen;
    for (const auto& token : whitespace_tokens(passage.text)) {
      std::string norm = normalize_token(token);
      if (!norm.empty() && query_tokens.count(norm) > 0) seen.insert(std::move(norm));
    }
    out.push_back({passage.id, static_cast<double>(seen.size())});
  }
  return out;
}

std::vector<ScoredCandidate> rerank_rrf_cross(const std::vector<DenseHit>& pool,
                                              const std::string& query,
                                              const std::set<std::string>& query_entities,
                                              const ChunkLookup& corpus,
                                              const CrossScorer& scorer,
                                              const RerankConfig& cfg) {
  std::vector<ScoredCandidate> fused = rerank_rrf(pool, query_entities, corpus, cfg.rrf_k);
  const std::size_t take =
      std::min<std::size_t>(fused.size(), static_cast<std::size_t>(cfg.cross_top_n));
  fused.resize(take);

  std::vector<CrossScorer::Passage> passages;
  passages.reserve(take);
  for (const auto& c : fused) {
    passages.push_back({c.chunk_id, corpus.at(c.chunk_id)->text});
  }
  std::vector<CrossScorer::Scored> scored = scorer.score(query, passages);

  std::unordered_map<std::string, double> by_id;
  for (const auto& s : scored) by_id.emplace(s.id, s.score);
  for (const auto& passage : passages) {
    if (by_id.find(passage.id) == by_id.end()) {
      throw DataError("cross-scorer response missing id: " + passage.id);
    }
  }

  // fused_score becomes the cross score; RRF survives in the rank order used
  // for tie-breaking (final ordering below falls back to the RRF position).
  std::vector<ScoredCandidate> result = std::move(fused);
  std::vector<int> rrf_rank(result.size());
  for (std::size_t i = 0; i < result.size(); ++i) {
    rrf_rank[i] = result[i].final_rank;
    result[i].fused_score = by_id.at(result[i].chunk_id);
  }
  std::vector<std::size_t> order(result.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (result[a].fused_score != result[b].fused_score) {
      return result[a].fused_score > result[b].fused_score;
    }
    if (rrf_rank[a] != rrf_rank[b]) return rrf_rank[a] < rrf_rank[b];
    return result[a].chunk_id < result[b].chunk_id;
  });
  std::vector<ScoredCandidate> final_list;
  final_list.reserve(result.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    ScoredCandidate c = result[order[i]];
    c.final_rank = static_cast<int>(i + 1);
    final_list.push_back(std::move(c));
  }
  return final_list;
}

}  // namespace elrag
