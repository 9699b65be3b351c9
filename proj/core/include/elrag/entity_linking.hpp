#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "elrag/corpus.hpp"
#include "elrag/embedding.hpp"
#include "elrag/text.hpp"

namespace elrag {

/// A knowledge-base candidate as returned by the search endpoint, with its
/// 0-based position in the candidate list.
struct EntityCandidate {
  std::string qid;  // Q[0-9]+
  std::string label;
  std::string description;  // may be empty
  int api_rank = 0;

  bool operator==(const EntityCandidate&) const = default;
};

enum class LinkerMode { fixture, live };

struct LinkerConfig {
  double alpha = 0.9;       // weight of the similarity signal
  int max_candidates = 7;   // shortlist size per surface
  std::string language = "it";
  LinkerMode mode = LinkerMode::fixture;
};

/// Mention-provider contract: deterministic, non-overlapping mentions, each
/// carrying its containing sentence as context.
class MentionProvider {
 public:
  virtual ~MentionProvider() = default;
  virtual std::vector<EntityMention> extract(const std::string& text) const = 0;
};

/// Reference mention provider: longest-match lookup against a fixed list of
/// surface forms, respecting word boundaries. The gazetteer file is
/// newline-delimited surfaces with an optional "|qid-hint" suffix; hints
/// document fixtures and are ignored here.
class GazetteerMentionProvider final : public MentionProvider {
 public:
  explicit GazetteerMentionProvider(std::vector<std::string> surfaces,
                                    SentenceSplitter splitter = {});
  static GazetteerMentionProvider load(const std::filesystem::path& path);

  std::vector<EntityMention> extract(const std::string& text) const override;
  const std::vector<std::string>& surfaces() const { return surfaces_; }

 private:
  std::vector<std::string> surfaces_;  // sorted by descending byte length
  SentenceSplitter splitter_;
};

/// Candidate-source contract; implementations: local fixture file or the
/// live knowledge-base client.
class CandidateSource {
 public:
  virtual ~CandidateSource() = default;
  /// Up to max_candidates candidates in API order (api_rank = position).
  /// An unknown surface yields an empty list, not an error.
  virtual std::vector<EntityCandidate> fetch(const std::string& surface, int max_candidates,
                                             const std::string& language) const = 0;
};

/// Fixture file: {"surface": [{"qid": str, "label": str, "description": str}]}.
class FixtureCandidateSource final : public CandidateSource {
 public:
  static FixtureCandidateSource load(const std::filesystem::path& path);

  std::vector<EntityCandidate> fetch(const std::string& surface, int max_candidates,
                                     const std::string& language) const override;

 private:
  explicit FixtureCandidateSource(std::map<std::string, std::vector<EntityCandidate>> entries)
      : entries_(std::move(entries)) {}
  std::map<std::string, std::vector<EntityCandidate>> entries_;
};

/// Inverse-rank prior over the candidate list: 1/(api_rank+1), so the top
/// candidate scores 1.0 and the prior decays strictly with rank.
double popularity(int api_rank);

/// alpha * similarity + (1 - alpha) * popularity(api_rank).
double hybrid_score(double alpha, double similarity, int api_rank);

struct CandidateScore {
  double similarity = 0.0;
  double hybrid = 0.0;
};

/// similarity = <embed(mention context), embed(label + " " + description)>;
/// hybrid = alpha * similarity + (1 - alpha) * popularity(api_rank).
CandidateScore score_candidate(const EntityMention& mention, const EntityCandidate& candidate,
                               const EmbeddingProvider& provider, const LinkerConfig& cfg);

/// Grounds mentions to entities for both chunks (offline enrichment) and
/// queries (online). Pure given its collaborators; safe to share across
/// threads.
class EntityLinker {
 public:
  EntityLinker(const MentionProvider& mentions, const CandidateSource& candidates,
               const EmbeddingProvider& embedder, LinkerConfig cfg)
      : mentions_(&mentions), candidates_(&candidates), embedder_(&embedder),
        cfg_(std::move(cfg)) {}

  /// Picks the hybrid-score argmax over the candidates for one mention;
  /// ties go to the lower api_rank, then the lexicographically smaller qid.
  /// Empty candidate list yields nullopt.
  std::optional<LinkedEntity> link_mention(const EntityMention& mention) const;

  /// Re-extracts mentions and fills linked_entities, deduplicated by qid
  /// keeping the highest hybrid score. Idempotent. Transport errors abort
  /// the chunk (no partially enriched chunk is returned).
  Chunk link_chunk(Chunk chunk) const;

  /// The deduplicated qid set of the query's linked mentions; the whole
  /// query string serves as the sentence context.
  std::set<std::string> link_query(const std::string& query) const;

  const LinkerConfig& config() const { return cfg_; }

 private:
  const MentionProvider* mentions_;
  const CandidateSource* candidates_;
  const EmbeddingProvider* embedder_;
  LinkerConfig cfg_;
};

/// The deduplicated qid set of a chunk's linked entities (the chunk-side
/// input to the entity-overlap score).
std::set<std::string> chunk_entity_ids(const Chunk& chunk);

}  // namespace elrag
