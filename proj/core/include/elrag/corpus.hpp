#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace elrag {

/// A timestamped piece of transcript text, the raw ingestion unit.
struct TranscriptSegment {
  std::string doc_id;
  std::string text;
  double start_time = 0.0;  // seconds
  double end_time = 0.0;

  bool operator==(const TranscriptSegment&) const = default;
};

/// A text span grounded to an entity mention: the surface form, the byte
/// span [begin, end) within the owning text, and the full sentence that
/// contains it (used as disambiguation context).
struct EntityMention {
  std::string surface;
  std::string sentence_context;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;

  bool operator==(const EntityMention&) const = default;
};

/// A knowledge-base entity chosen for a mention, with the scores that
/// selected it: popularity = 1/(api_rank+1), similarity = embedding inner
/// product between mention context and label+description, and the alpha
/// blend of the two.
struct LinkedEntity {
  std::string qid;
  std::string label;
  std::string description;
  double popularity = 0.0;
  double similarity = 0.0;
  double hybrid_score = 0.0;
  EntityMention mention;

  bool operator==(const LinkedEntity&) const = default;
};

struct ChunkFlags {
  bool short_chunk = false;  // token_count below the configured minimum
  bool oversized = false;    // a single sentence above the configured maximum

  bool operator==(const ChunkFlags&) const = default;
};

/// The retrieval unit: a group of whole sentences from one document.
struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  std::string text;
  int token_count = 0;
  double start_time = 0.0;
  double end_time = 0.0;
  std::vector<EntityMention> mentions;
  std::vector<LinkedEntity> linked_entities;
  ChunkFlags flags;

  bool operator==(const Chunk&) const = default;
};

struct Corpus {
  std::vector<Chunk> chunks;
  std::map<std::string, std::string> metadata;

  bool operator==(const Corpus&) const = default;
};

using ChunkLookup = std::unordered_map<std::string, const Chunk*>;

/// Builds an id -> chunk map. Duplicate chunk ids raise DataError.
ChunkLookup make_chunk_lookup(const Corpus& corpus);

/// Writes the corpus as UTF-8 JSON: {"metadata": {...}, "chunks": [...]}.
/// Serialization is deterministic, so identical corpora give identical bytes.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Reads a corpus back. Also accepts a bare top-level array of chunk
/// records (metadata empty). Malformed JSON, missing required fields, and
/// duplicate chunk ids raise DataError with the offending field path or id.
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace elrag
