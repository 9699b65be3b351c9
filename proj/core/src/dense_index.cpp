#include "elrag/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "elrag/errors.hpp"
#include "json.hpp"

namespace elrag {

DenseIndex DenseIndex::build(const Corpus& corpus, const EmbeddingProvider& provider) {
  if (corpus.chunks.empty()) throw DataError("empty corpus");
  const int dim = provider.dim();
  const bool by_id = provider.chunk_key() == EmbeddingProvider::ChunkKey::chunk_id;

  std::vector<std::string> ids;
  ids.reserve(corpus.chunks.size());
  std::vector<float> matrix;
  matrix.reserve(corpus.chunks.size() * static_cast<std::size_t>(dim));

  for (const auto& chunk : corpus.chunks) {
    EmbeddingVector vec;
    try {
      vec = provider.embed(by_id ? chunk.chunk_id : chunk.text);
    } catch (const DataError& e) {
      throw DataError("embedding chunk " + chunk.chunk_id + ": " + e.what());
    }
    if (static_cast<int>(vec.size()) != dim) {
      throw DataError("embedding chunk " + chunk.chunk_id + ": dimension " +
                      std::to_string(vec.size()) + " != " + std::to_string(dim));
    }
    if (std::abs(l2_norm(vec) - 1.0) > 1e-6) {
      throw DataError("embedding chunk " + chunk.chunk_id + ": vector is not unit-norm");
    }
    ids.push_back(chunk.chunk_id);
    matrix.insert(matrix.end(), vec.begin(), vec.end());
  }
  return DenseIndex(dim, std::move(ids), std::move(matrix));
}

std::span<const float> DenseIndex::row(std::size_t i) const {
  return {matrix_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
}

std::vector<DenseHit> DenseIndex::search(std::span<const float> query, int k) const {
  if (k < 1) throw std::invalid_argument("search: k must be >= 1");
  if (static_cast<int>(query.size()) != dim_) {
    throw DataError("query dimension " + std::to_string(query.size()) + " != index dimension " +
                    std::to_string(dim_));
  }

  std::vector<double> scores(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    scores[i] = dot(query, row(i));
  }

  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids_[a] < ids_[b];
  };
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(), better);

  std::vector<DenseHit> hits;
  hits.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    hits.push_back({ids_[order[r]], scores[order[r]], static_cast<int>(r + 1)});
  }
  return hits;
}

void DenseIndex::save(const std::filesystem::path& dir,
                      const std::string& config_fingerprint) const {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest{
      {"dim", dim_},
      {"count", ids_.size()},
      {"config_fingerprint", config_fingerprint},
      {"ids", ids_},
  };
  std::ofstream ids_out(dir / "ids.json", std::ios::binary);
  if (!ids_out) throw DataError("cannot write index manifest in " + dir.string());
  ids_out << manifest.dump(2) << '\n';

  std::vector<std::pair<std::string, EmbeddingVector>> entries;
  entries.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    auto r = row(i);
    entries.emplace_back(ids_[i], EmbeddingVector(r.begin(), r.end()));
  }
  write_embedding_store(dir / "vectors.jsonl", entries, dim_);
}

DenseIndex DenseIndex::load(const std::filesystem::path& dir) {
  std::ifstream ids_in(dir / "ids.json", std::ios::binary);
  if (!ids_in) throw DataError("cannot open index manifest: " + (dir / "ids.json").string());
  nlohmann::json manifest;
  try {
    ids_in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed index manifest: " + std::string(e.what()));
  }
  const int dim = manifest.at("dim").get<int>();
  auto ids = manifest.at("ids").get<std::vector<std::string>>();

  auto store = FileEmbeddingStore::load(dir / "vectors.jsonl", dim);
  std::vector<float> matrix;
  matrix.reserve(ids.size() * static_cast<std::size_t>(dim));
  for (const auto& id : ids) {
    EmbeddingVector vec = store.embed(id);
    matrix.insert(matrix.end(), vec.begin(), vec.end());
  }
  return DenseIndex(dim, std::move(ids), std::move(matrix));
}

}  // namespace elrag
