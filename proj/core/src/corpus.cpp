#include "elrag/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "elrag/errors.hpp"
#include "json.hpp"

namespace elrag {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json mention_to_json(const EntityMention& m) {
  return ordered_json{
      {"surface", m.surface},
      {"sentence_context", m.sentence_context},
      {"span", {m.span_begin, m.span_end}},
  };
}

ordered_json entity_to_json(const LinkedEntity& e) {
  return ordered_json{
      {"qid", e.qid},
      {"label", e.label},
      {"description", e.description},
      {"popularity", e.popularity},
      {"similarity", e.similarity},
      {"hybrid_score", e.hybrid_score},
      {"mention", mention_to_json(e.mention)},
  };
}

ordered_json chunk_to_json(const Chunk& c) {
  ordered_json mentions = ordered_json::array();
  for (const auto& m : c.mentions) mentions.push_back(mention_to_json(m));
  ordered_json entities = ordered_json::array();
  for (const auto& e : c.linked_entities) entities.push_back(entity_to_json(e));
  return ordered_json{
      {"chunk_id", c.chunk_id},
      {"doc_id", c.doc_id},
      {"text", c.text},
      {"token_count", c.token_count},
      {"start_time", c.start_time},
      {"end_time", c.end_time},
      {"mentions", std::move(mentions)},
      {"linked_entities", std::move(entities)},
      {"flags", {{"short", c.flags.short_chunk}, {"oversized", c.flags.oversized}}},
  };
}

// ---- loading with field-path diagnostics ----------------------------------

const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                    const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError("corpus schema error: missing field " + path + "." + key);
  }
  return *it;
}

template <typename T>
T field_as(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require_field(obj, key, path);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError("corpus schema error: wrong type for " + path + "." + key);
  }
}

EntityMention mention_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw DataError("corpus schema error: " + path + " must be an object");
  EntityMention m;
  m.surface = field_as<std::string>(j, "surface", path);
  m.sentence_context = field_as<std::string>(j, "sentence_context", path);
  const auto& span = require_field(j, "span", path);
  if (!span.is_array() || span.size() != 2) {
    throw DataError("corpus schema error: " + path + ".span must be [begin, end]");
  }
  m.span_begin = span[0].get<std::size_t>();
  m.span_end = span[1].get<std::size_t>();
  return m;
}

LinkedEntity entity_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw DataError("corpus schema error: " + path + " must be an object");
  LinkedEntity e;
  e.qid = field_as<std::string>(j, "qid", path);
  e.label = field_as<std::string>(j, "label", path);
  e.description = field_as<std::string>(j, "description", path);
  e.popularity = field_as<double>(j, "popularity", path);
  e.similarity = field_as<double>(j, "similarity", path);
  e.hybrid_score = field_as<double>(j, "hybrid_score", path);
  e.mention = mention_from_json(require_field(j, "mention", path), path + ".mention");
  return e;
}

Chunk chunk_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw DataError("corpus schema error: " + path + " must be an object");
  Chunk c;
  c.chunk_id = field_as<std::string>(j, "chunk_id", path);
  c.doc_id = field_as<std::string>(j, "doc_id", path);
  c.text = field_as<std::string>(j, "text", path);
  c.token_count = field_as<int>(j, "token_count", path);
  c.start_time = field_as<double>(j, "start_time", path);
  c.end_time = field_as<double>(j, "end_time", path);
  if (c.text.empty()) throw DataError("corpus schema error: empty text at " + path);
  if (c.end_time < c.start_time) {
    throw DataError("corpus schema error: end_time < start_time at " + path);
  }
  const auto& mentions = require_field(j, "mentions", path);
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    c.mentions.push_back(
        mention_from_json(mentions[i], path + ".mentions[" + std::to_string(i) + "]"));
  }
  const auto& entities = require_field(j, "linked_entities", path);
  for (std::size_t i = 0; i < entities.size(); ++i) {
    c.linked_entities.push_back(
        entity_from_json(entities[i], path + ".linked_entities[" + std::to_string(i) + "]"));
  }
  if (auto it = j.find("flags"); it != j.end() && it->is_object()) {
    c.flags.short_chunk = it->value("short", false);
    c.flags.oversized = it->value("oversized", false);
  }
  return c;
}

}  // namespace

ChunkLookup make_chunk_lookup(const Corpus& corpus) {
  ChunkLookup lookup;
  lookup.reserve(corpus.chunks.size());
  for (const auto& chunk : corpus.chunks) {
    auto [it, inserted] = lookup.emplace(chunk.chunk_id, &chunk);
    if (!inserted) throw DataError("duplicate chunk_id: " + chunk.chunk_id);
  }
  return lookup;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  ordered_json chunks = ordered_json::array();
  for (const auto& c : corpus.chunks) chunks.push_back(chunk_to_json(c));
  ordered_json doc{
      {"metadata", corpus.metadata},
      {"chunks", std::move(chunks)},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open corpus file for writing: " + path.string());
  out << doc.dump(2) << '\n';
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed corpus JSON in " + path.string() + ": " + e.what());
  }

  Corpus corpus;
  const nlohmann::json* chunks = nullptr;
  if (doc.is_array()) {
    chunks = &doc;
  } else if (doc.is_object()) {
    if (auto it = doc.find("metadata"); it != doc.end()) {
      corpus.metadata = it->get<std::map<std::string, std::string>>();
    }
    auto it = doc.find("chunks");
    if (it == doc.end() || !it->is_array()) {
      throw DataError("corpus schema error: missing \"chunks\" array in " + path.string());
    }
    chunks = &*it;
  } else {
    throw DataError("corpus schema error: top level must be an object or array");
  }

  std::set<std::string> seen;
  for (std::size_t i = 0; i < chunks->size(); ++i) {
    Chunk c = chunk_from_json((*chunks)[i], "chunks[" + std::to_string(i) + "]");
    if (!seen.insert(c.chunk_id).second) {
      throw DataError("duplicate chunk_id in corpus: " + c.chunk_id);
    }
    corpus.chunks.push_back(std::move(c));
  }
  return corpus;
}

}  // namespace elrag
