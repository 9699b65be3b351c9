#include "elrag/embedding.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "elrag/digest.hpp"
#include "elrag/errors.hpp"
#include "elrag/text.hpp"
#include "json.hpp"

namespace elrag {

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw DataError("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double l2_norm(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(sum);
}

void l2_normalize(EmbeddingVector& v) {
  double norm = l2_norm(v);
  if (norm == 0.0) return;
  for (float& x : v) x = static_cast<float>(x / norm);
}

HashEmbedder::HashEmbedder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim <= 0) throw std::invalid_argument("HashEmbedder: dim must be positive");
}

EmbeddingVector HashEmbedder::embed(const std::string& text) const {
  std::vector<double> acc(static_cast<std::size_t>(dim_), 0.0);
  for (const auto& token : whitespace_tokens(text)) {
    std::uint64_t h = seeded_hash64(token, seed_);
    // Bucket from the high bits, sign from bit 0; using the low bits for
    // both would tie the sign to the bucket parity.
    std::size_t bucket = static_cast<std::size_t>((h >> 16) % static_cast<std::uint64_t>(dim_));
    acc[bucket] += (h & 1u) ? 1.0 : -1.0;
  }
  bool nonzero = false;
  for (double x : acc) {
    if (x != 0.0) {
      nonzero = true;
      break;
    }
  }

  EmbeddingVector out(static_cast<std::size_t>(dim_), 0.0f);
  if (!nonzero) {
    out[0] = 1.0f;
    return out;
  }
  double norm = 0.0;
  for (double x : acc) norm += x * x;
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out[i] = static_cast<float>(acc[i] / norm);
  }
  return out;
}

FileEmbeddingStore FileEmbeddingStore::load(const std::filesystem::path& path, int expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding store: " + path.string());

  std::unordered_map<std::string, EmbeddingVector> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("embedding store " + path.string() + " line " + std::to_string(line_no) +
                      ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("key") || !obj.contains("vector")) {
      throw DataError("embedding store " + path.string() + " line " + std::to_string(line_no) +
                      ": expected {\"key\", \"vector\"}");
    }
    std::string key = obj["key"].get<std::string>();
    EmbeddingVector vec = obj["vector"].get<EmbeddingVector>();
    if (static_cast<int>(vec.size()) != expected_dim) {
      throw DataError("embedding store key \"" + key + "\": dimension " +
                      std::to_string(vec.size()) + " != configured " +
                      std::to_string(expected_dim));
    }
    double norm = l2_norm(vec);
    if (std::abs(norm - 1.0) > 1e-3) {
      throw DataError("embedding store key \"" + key + "\": norm " + std::to_string(norm) +
                      " deviates from 1 by more than 1e-3");
    }
    l2_normalize(vec);
    if (!entries.emplace(std::move(key), std::move(vec)).second) {
      throw DataError("embedding store " + path.string() + ": duplicate key at line " +
                      std::to_string(line_no));
    }
  }
  return FileEmbeddingStore(expected_dim, std::move(entries));
}

EmbeddingVector FileEmbeddingStore::embed(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw DataError("embedding key not found: \"" + key + "\"");
  }
  return it->second;
}

void write_embedding_store(const std::filesystem::path& path,
                           const std::vector<std::pair<std::string, EmbeddingVector>>& entries,
                           int dim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open embedding store for writing: " + path.string());
  out << "# elrag embedding store, dim=" << dim
      << "; texts are embedded as provided (query/passage prefixing, if any, happens upstream)\n";
  for (const auto& [key, vec] : entries) {
    nlohmann::ordered_json obj{{"key", key}, {"vector", vec}};
    out << obj.dump() << '\n';
  }
}

}  // namespace elrag
