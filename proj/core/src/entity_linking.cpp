#include "elrag/entity_linking.hpp"

#include <algorithm>
#include <fstream>

#include "elrag/errors.hpp"
#include "json.hpp"

namespace elrag {

namespace {

// Word boundaries for gazetteer matching: ASCII alphanumerics and all
// multi-byte UTF-8 units count as word bytes.
bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool boundary_before(const std::string& text, std::size_t pos) {
  return pos == 0 || !is_word_byte(static_cast<unsigned char>(text[pos - 1]));
}

bool boundary_after(const std::string& text, std::size_t end) {
  return end >= text.size() || !is_word_byte(static_cast<unsigned char>(text[end]));
}

}  // namespace

GazetteerMentionProvider::GazetteerMentionProvider(std::vector<std::string> surfaces,
                                                   SentenceSplitter splitter)
    : surfaces_(std::move(surfaces)), splitter_(std::move(splitter)) {
  std::erase_if(surfaces_, [](const std::string& s) { return s.empty(); });
  // Longest first, then lexicographic, so matching is deterministic.
  std::sort(surfaces_.begin(), surfaces_.end(), [](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  surfaces_.erase(std::unique(surfaces_.begin(), surfaces_.end()), surfaces_.end());
}

GazetteerMentionProvider GazetteerMentionProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open gazetteer file: " + path.string());
  std::vector<std::string> surfaces;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    // "surface|qid-hint": the hint documents fixtures, the linker ignores it.
    std::size_t bar = line.find('|');
    std::string surface = bar == std::string::npos ? line : line.substr(0, bar);
    while (!surface.empty() && surface.back() == ' ') surface.pop_back();
    if (!surface.empty()) surfaces.push_back(std::move(surface));
  }
  return GazetteerMentionProvider(std::move(surfaces));
}

std::vector<EntityMention> GazetteerMentionProvider::extract(const std::string& text) const {
  std::vector<SentenceSpan> sentences = splitter_.split(text);
  auto context_for = [&](std::size_t pos) -> std::string {
    for (const auto& s : sentences) {
      if (pos >= s.begin && pos < s.end) return s.text;
    }
    return text;  // mention outside any sentence span (should not happen)
  };

  std::vector<EntityMention> mentions;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (!boundary_before(text, pos)) {
      ++pos;
      continue;
    }
    const std::string* matched = nullptr;
    for (const auto& surface : surfaces_) {  // longest first
      if (text.compare(pos, surface.size(), surface) == 0 &&
          boundary_after(text, pos + surface.size())) {
        matched = &surface;
        break;
      }
    }
    if (matched) {
      EntityMention m;
      m.surface = *matched;
      m.span_begin = pos;
      m.span_end = pos + matched->size();
      m.sentence_context = context_for(pos);
      mentions.push_back(std::move(m));
      pos += matched->size();
    } else {
      ++pos;
    }
  }
  return mentions;
}

FixtureCandidateSource FixtureCandidateSource::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open entity fixture file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed entity fixture " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw DataError("entity fixture must be an object of surface -> candidate list");
  }
  std::map<std::string, std::vector<EntityCandidate>> entries;
  for (const auto& [surface, list] : doc.items()) {
    std::vector<EntityCandidate> candidates;
    int rank = 0;
    for (const auto& item : list) {
      EntityCandidate c;
      c.qid = item.at("qid").get<std::string>();
      c.label = item.at("label").get<std::string>();
      c.description = item.value("description", std::string{});
      c.api_rank = rank++;
      candidates.push_back(std::move(c));
    }
    entries.emplace(surface, std::move(candidates));
  }
  return FixtureCandidateSource(std::move(entries));
}

std::vector<EntityCandidate> FixtureCandidateSource::fetch(const std::string& surface,
                                                           int max_candidates,
                                                           const std::string& /*language*/) const {
  auto it = entries_.find(surface);
  if (it == entries_.end()) return {};
  std::vector<EntityCandidate> out = it->second;
  if (static_cast<int>(out.size()) > max_candidates) {
    out.resize(static_cast<std::size_t>(max_candidates));
  }
  return out;
}

double popularity(int api_rank) { return 1.0 / (api_rank + 1); }

double hybrid_score(double alpha, double similarity, int api_rank) {
  return alpha * similarity + (1.0 - alpha) * popularity(api_rank);
}

CandidateScore score_candidate(const EntityMention& mention, const EntityCandidate& candidate,
                               const EmbeddingProvider& provider, const LinkerConfig& cfg) {
  EmbeddingVector context_vec = provider.embed(mention.sentence_context);
  EmbeddingVector candidate_vec = provider.embed(candidate.label + " " + candidate.description);
  CandidateScore score;
  score.similarity = dot(context_vec, candidate_vec);
  score.hybrid = hybrid_score(cfg.alpha, score.similarity, candidate.api_rank);
  return score;
}

std::optional<LinkedEntity> EntityLinker::link_mention(const EntityMention& mention) const {
  std::vector<EntityCandidate> candidates =
      candidates_->fetch(mention.surface, cfg_.max_candidates, cfg_.language);
  if (candidates.empty()) return std::nullopt;

  const EntityCandidate* best = nullptr;
  CandidateScore best_score;
  for (const auto& candidate : candidates) {
    CandidateScore score = score_candidate(mention, candidate, *embedder_, cfg_);
    bool wins = best == nullptr || score.hybrid > best_score.hybrid ||
                (score.hybrid == best_score.hybrid &&
                 (candidate.api_rank < best->api_rank ||
                  (candidate.api_rank == best->api_rank && candidate.qid < best->qid)));
    if (wins) {
      best = &candidate;
      best_score = score;
    }
  }

  LinkedEntity linked;
  linked.qid = best->qid;
  linked.label = best->label;
  linked.description = best->description;
  linked.popularity = popularity(best->api_rank);
  linked.similarity = best_score.similarity;
  linked.hybrid_score = best_score.hybrid;
  linked.mention = mention;
  return linked;
}

Chunk EntityLinker::link_chunk(Chunk chunk) const {
  chunk.mentions = mentions_->extract(chunk.text);
  std::vector<LinkedEntity> linked;
  for (const auto& mention : chunk.mentions) {
    if (auto entity = link_mention(mention)) {
      // Dedup by qid, keeping the instance with the highest hybrid score.
      auto existing = std::find_if(linked.begin(), linked.end(), [&](const LinkedEntity& e) {
        return e.qid == entity->qid;
      });
      if (existing == linked.end()) {
        linked.push_back(std::move(*entity));
      } else if (entity->hybrid_score > existing->hybrid_score) {
        *existing = std::move(*entity);
      }
    }
  }
  chunk.linked_entities = std::move(linked);
  return chunk;
}

std::set<std::string> EntityLinker::link_query(const std::string& query) const {
  std::set<std::string> qids;
  for (EntityMention mention : mentions_->extract(query)) {
    mention.sentence_context = query;  // the whole query is the context
    if (auto entity = link_mention(mention)) {
      qids.insert(entity->qid);
    }
  }
  return qids;
}

std::set<std::string> chunk_entity_ids(const Chunk& chunk) {
  std::set<std::string> qids;
  for (const auto& entity : chunk.linked_entities) qids.insert(entity.qid);
  return qids;
}

}  // namespace elrag
