#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "elrag/corpus.hpp"
#include "elrag/embedding.hpp"

namespace elrag {

/// One dense-retrieval result: inner-product score and 1-based rank.
struct DenseHit {
  std::string chunk_id;
  double dense_score = 0.0;
  int dense_rank = 0;
};

/// Exact flat inner-product index over the corpus embeddings. Rows follow
/// corpus order and are unit-norm; the index is immutable after build, so
/// concurrent searches are safe.
class DenseIndex {
 public:
  /// Embeds every chunk (keyed per provider.chunk_key()) and validates unit
  /// norms. Empty corpus raises DataError("empty corpus"); a provider
  /// missing a chunk's vector propagates with that chunk_id.
  static DenseIndex build(const Corpus& corpus, const EmbeddingProvider& provider);

  /// Exact top-k by inner product, ties broken by ascending chunk_id, ranks
  /// assigned 1..n. Returns min(k, size()) hits. k must be >= 1.
  std::vector<DenseHit> search(std::span<const float> query, int k) const;

  std::size_t size() const { return ids_.size(); }
  int dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> row(std::size_t i) const;

  /// Binary-free persistence: ids.json (manifest with dim and fingerprint)
  /// plus vectors.jsonl in the embedding-store format.
  void save(const std::filesystem::path& dir, const std::string& config_fingerprint) const;
  static DenseIndex load(const std::filesystem::path& dir);

 private:
  DenseIndex(int dim, std::vector<std::string> ids, std::vector<float> matrix)
      : dim_(dim), ids_(std::move(ids)), matrix_(std::move(matrix)) {}

  int dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> matrix_;  // row-major, ids_.size() x dim_
};

}  // namespace elrag
