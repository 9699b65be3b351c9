#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace elrag {

using EmbeddingVector = std::vector<float>;

/// Inner product accumulated in double, in index order, so the result is
/// bit-identical regardless of argument order. Dimension mismatch raises
/// DataError.
double dot(std::span<const float> a, std::span<const float> b);

double l2_norm(std::span<const float> v);

/// Scales v to unit norm; a zero vector is left untouched.
void l2_normalize(EmbeddingVector& v);

/// Embedding provider contract: fixed-dimension unit-norm vectors,
/// deterministic per key. Providers are immutable after construction and
/// safe for concurrent embed() calls.
class EmbeddingProvider {
 public:
  /// Which key build_index should pass for a corpus chunk: the chunk text
  /// (computing embedders) or the chunk_id (precomputed stores).
  enum class ChunkKey { text, chunk_id };

  virtual ~EmbeddingProvider() = default;
  virtual int dim() const = 0;
  virtual EmbeddingVector embed(const std::string& key) const = 0;
  virtual ChunkKey chunk_key() const { return ChunkKey::text; }
};

/// Deterministic model-free embedder for tests and desk-scale runs: each
/// whitespace token is hashed into a bucket with a seeded 64-bit hash and
/// accumulated as +1/-1 by hash parity, then the vector is L2-normalized.
/// Texts with overlapping vocabulary get correlated vectors. An all-zero
/// accumulation (e.g. whitespace-only input) falls back to the first basis
/// vector so the unit-norm contract always holds.
class HashEmbedder final : public EmbeddingProvider {
 public:
  HashEmbedder(int dim, std::uint64_t seed);

  int dim() const override { return dim_; }
  EmbeddingVector embed(const std::string& text) const override;
  std::uint64_t seed() const { return seed_; }

 private:
  int dim_;
  std::uint64_t seed_;
};

/// Read-only store of precomputed vectors loaded from a JSON-lines file,
/// one {"key": str, "vector": [float, ...]} object per line. Lines starting
/// with '#' are header comments. Keys are chunk ids for corpus vectors and
/// the literal query string for query vectors.
class FileEmbeddingStore final : public EmbeddingProvider {
 public:
  /// Loads eagerly. Every vector must have the expected dimension and a
  /// norm within 1e-3 of 1 (vectors are re-normalized exactly after the
  /// check); violations raise DataError.
  static FileEmbeddingStore load(const std::filesystem::path& path, int expected_dim);

  int dim() const override { return dim_; }
  EmbeddingVector embed(const std::string& key) const override;
  ChunkKey chunk_key() const override { return ChunkKey::chunk_id; }
  std::size_t size() const { return entries_.size(); }

 private:
  FileEmbeddingStore(int dim, std::unordered_map<std::string, EmbeddingVector> entries)
      : dim_(dim), entries_(std::move(entries)) {}

  int dim_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
};

/// Writes a store file readable by FileEmbeddingStore::load. The header
/// line notes that any query/passage prefixing is expected to have happened
/// upstream, before vectors were computed.
void write_embedding_store(const std::filesystem::path& path,
                           const std::vector<std::pair<std::string, EmbeddingVector>>& entries,
                           int dim);

}  // namespace elrag
