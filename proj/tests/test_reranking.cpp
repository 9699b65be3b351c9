#include "doctest.h"
#include "elrag/errors.hpp"
#include "elrag/reranking.hpp"
#include "test_support.hpp"

#include <random>

using namespace elrag;

namespace {

// A corpus whose chunks carry preset entity sets.
struct PoolFixture {
  Corpus corpus;
  ChunkLookup lookup;
  std::vector<DenseHit> pool;

  PoolFixture(std::initializer_list<std::pair<double, std::set<std::string>>> init)
      : PoolFixture(std::vector<std::pair<double, std::set<std::string>>>(init)) {}

  explicit PoolFixture(const std::vector<std::pair<double, std::set<std::string>>>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Chunk chunk;
      char id[16];
      std::snprintf(id, sizeof(id), "c%02zu", i);
      chunk.chunk_id = id;
      chunk.doc_id = "doc";
      chunk.text = "testo del chunk " + std::to_string(i);
      chunk.token_count = 4;
      for (const auto& qid : rows[i].second) {
        LinkedEntity entity;
        entity.qid = qid;
        entity.label = qid;
        chunk.linked_entities.push_back(std::move(entity));
      }
      corpus.chunks.push_back(std::move(chunk));
    }
    lookup = make_chunk_lookup(corpus);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      pool.push_back({corpus.chunks[i].chunk_id, rows[i].first, int(i + 1)});
    }
  }
};

std::vector<std::string> ids_of(const std::vector<ScoredCandidate>& candidates) {
  std::vector<std::string> ids;
  for (const auto& c : candidates) ids.push_back(c.chunk_id);
  return ids;
}

std::vector<DenseHit> random_pool(std::mt19937_64& rng, PoolFixture& fixture_out);

}  // namespace

TEST_CASE("entity_overlap follows the recall-oriented formula") {
  CHECK(entity_overlap({"A", "B"}, {"B", "C"}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(entity_overlap({}, {"A", "B", "C"}) == 0.0);
  CHECK(entity_overlap({"A"}, {"A"}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entity_overlap({"A", "B", "C"}, {}) == 0.0);
}

TEST_CASE("rerank_weighted: beta=0 reproduces the dense order") {
  PoolFixture f({{0.9, {}}, {0.8, {"Q1"}}, {0.7, {"Q1", "Q2"}}});
  auto out = rerank_weighted(f.pool, {"Q1", "Q2"}, f.lookup, 0.0);
  CHECK(ids_of(out) == std::vector<std::string>{"c00", "c01", "c02"});
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].final_rank == int(i + 1));
    CHECK(out[i].fused_score == doctest::Approx(out[i].dense_score).epsilon(1e-12));
  }
}

TEST_CASE("rerank_weighted: the entity signal can flip a close dense pair") {
  PoolFixture f({{0.70, {}}, {0.68, {"Q1"}}});
  auto out = rerank_weighted(f.pool, {"Q1"}, f.lookup, 0.5);
  REQUIRE(out.size() == 2);
  CHECK(out[0].chunk_id == "c01");
  CHECK(out[0].fused_score == doctest::Approx(1.18).epsilon(1e-12));
  CHECK(out[1].fused_score == doctest::Approx(0.70).epsilon(1e-12));
}

TEST_CASE("rerank_weighted: equal entity scores preserve the dense order") {
  PoolFixture f({{0.9, {"Q1"}}, {0.8, {"Q1"}}, {0.7, {"Q1"}}});
  auto out = rerank_weighted(f.pool, {"Q1"}, f.lookup, 3.0);
  CHECK(ids_of(out) == std::vector<std::string>{"c00", "c01", "c02"});
}

TEST_CASE("rerank_weighted rejects a pool id missing from the corpus") {
  PoolFixture f({{0.9, {}}});
  std::vector<DenseHit> pool{{"ghost", 0.5, 1}};
  CHECK_THROWS_WITH_AS(rerank_weighted(pool, {}, f.lookup, 0.5), doctest::Contains("ghost"),
                       DataError);
}

TEST_CASE("assign_entity_ranks orders by score, then dense rank, then id") {
  std::vector<ScoredCandidate> pool(3);
  pool[0] = {"a", 0.9, 1, 1.0, 0, 0.0, 0};
  pool[1] = {"b", 0.8, 2, 0.5, 0, 0.0, 0};
  pool[2] = {"c", 0.7, 3, 0.0, 0, 0.0, 0};
  assign_entity_ranks(pool);
  CHECK(pool[0].entity_rank == 1);
  CHECK(pool[1].entity_rank == 2);
  CHECK(pool[2].entity_rank == 3);

  // all scores zero: entity ranks collapse to dense ranks
  for (auto& c : pool) c.entity_score = 0.0;
  assign_entity_ranks(pool);
  for (const auto& c : pool) CHECK(c.entity_rank == c.dense_rank);

  // tie at 0.5 between dense ranks 4 and 2: the better dense rank wins
  std::vector<ScoredCandidate> tied(2);
  tied[0] = {"x", 0.5, 4, 0.5, 0, 0.0, 0};
  tied[1] = {"y", 0.6, 2, 0.5, 0, 0.0, 0};
  assign_entity_ranks(tied);
  CHECK(tied[1].entity_rank == 1);
  CHECK(tied[0].entity_rank == 2);
}

TEST_CASE("rerank_rrf computes the reciprocal rank fusion score") {
  // both ranks 1: 2/(K+1)
  PoolFixture single({{0.9, {"Q1"}}});
  auto out = rerank_rrf(single.pool, {"Q1"}, single.lookup, 60);
  REQUIRE(out.size() == 1);
  CHECK(out[0].fused_score == doctest::Approx(2.0 / 61.0).epsilon(1e-12));

  // dense rank 1 with entity rank 3 vs the hand-computed sum
  PoolFixture f({{0.9, {}}, {0.8, {"Q1"}}, {0.7, {"Q1"}}});
  out = rerank_rrf(f.pool, {"Q1"}, f.lookup, 60);
  const ScoredCandidate* top_dense = nullptr;
  for (const auto& c : out) {
    if (c.chunk_id == "c00") top_dense = &c;
  }
  REQUIRE(top_dense != nullptr);
  CHECK(top_dense->entity_rank == 3);
  CHECK(top_dense->fused_score == doctest::Approx(1.0 / 61.0 + 1.0 / 63.0).epsilon(1e-12));
}

TEST_CASE("rerank_rrf: all-zero entity scores reduce to the dense order") {
  PoolFixture f({{0.9, {"Q9"}}, {0.8, {}}, {0.7, {"Q8"}}, {0.6, {}}});
  auto out = rerank_rrf(f.pool, {}, f.lookup, 60);
  CHECK(ids_of(out) == std::vector<std::string>{"c00", "c01", "c02", "c03"});
}

TEST_CASE("rrf scores are bounded by (0, 2/(K+1)]") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    PoolFixture f({{0.9, {"Q1"}}, {0.8, {"Q2"}}, {0.7, {}}, {0.6, {"Q1", "Q2"}}, {0.5, {}}});
    auto out = rerank_rrf(f.pool, {"Q1", "Q2"}, f.lookup, 60);
    for (const auto& c : out) {
      CHECK(c.fused_score > 0.0);
      CHECK(c.fused_score <= 2.0 / 61.0 + 1e-15);
    }
  }
}

namespace {

std::vector<DenseHit> random_pool(std::mt19937_64& rng, PoolFixture& fixture_out) {
  std::uniform_int_distribution<int> pool_size(2, 12);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::uniform_int_distribution<int> entity(0, 2);
  std::vector<std::pair<double, std::set<std::string>>> rows;
  int n = pool_size(rng);
  std::vector<double> scores;
  for (int i = 0; i < n; ++i) scores.push_back(score(rng));
  std::sort(scores.rbegin(), scores.rend());
  for (int i = 0; i < n; ++i) {
    std::set<std::string> qids;
    for (int q = 0; q < 2; ++q) {
      if (entity(rng) == 0) qids.insert("Q" + std::to_string(q));
    }
    rows.push_back({scores[size_t(i)], qids});
  }
  fixture_out = PoolFixture(rows);
  return fixture_out.pool;
}

}  // namespace

TEST_CASE("rrf depends only on ranks: affine dense-score transforms keep the order") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    PoolFixture fixture({{0.5, {}}});
    std::vector<DenseHit> pool = random_pool(rng, fixture);
    std::set<std::string> query_entities{"Q0", "Q1"};

    auto before = rerank_rrf(pool, query_entities, fixture.lookup, 60);
    std::vector<DenseHit> transformed = pool;
    for (auto& hit : transformed) hit.dense_score = 3.0 * hit.dense_score + 7.0;
    auto after = rerank_rrf(transformed, query_entities, fixture.lookup, 60);
    CHECK(ids_of(before) == ids_of(after));
  }
}

TEST_CASE("weighted fusion: raising beta never demotes the top-entity chunk") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> beta_dist(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    PoolFixture fixture({{0.5, {}}});
    std::vector<DenseHit> pool = random_pool(rng, fixture);
    std::set<std::string> query_entities{"Q0", "Q1"};
    double beta_low = beta_dist(rng);
    double beta_high = beta_low + beta_dist(rng);

    auto low = rerank_weighted(pool, query_entities, fixture.lookup, beta_low);
    auto high = rerank_weighted(pool, query_entities, fixture.lookup, beta_high);

    // the candidate holding the pool-maximum entity score
    double max_entity = 0.0;
    for (const auto& c : low) max_entity = std::max(max_entity, c.entity_score);
    for (const auto& c : low) {
      if (c.entity_score == max_entity) {
        for (const auto& h : high) {
          if (h.chunk_id == c.chunk_id) CHECK(h.final_rank <= c.final_rank);
        }
      }
    }
  }
}

TEST_CASE("all strategies permute the pool ids") {
  std::mt19937_64 rng(11);
  OrderPreservingScorer stub;
  for (int trial = 0; trial < 20; ++trial) {
    PoolFixture fixture({{0.5, {}}});
    std::vector<DenseHit> pool = random_pool(rng, fixture);
    std::set<std::string> query_entities{"Q0"};

    auto sorted_ids = [](std::vector<std::string> ids) {
      std::sort(ids.begin(), ids.end());
      return ids;
    };
    std::vector<std::string> pool_ids;
    for (const auto& hit : pool) pool_ids.push_back(hit.chunk_id);
    pool_ids = sorted_ids(pool_ids);

    CHECK(sorted_ids(ids_of(rerank_weighted(pool, query_entities, fixture.lookup, 0.5))) ==
          pool_ids);
    CHECK(sorted_ids(ids_of(rerank_rrf(pool, query_entities, fixture.lookup, 60))) == pool_ids);

    RerankConfig cfg;
    cfg.cross_top_n = int(pool.size());
    CHECK(sorted_ids(ids_of(rerank_rrf_cross(pool, "una query", query_entities, fixture.lookup,
                                             stub, cfg))) == pool_ids);
  }
}

TEST_CASE("rerank_rrf_cross: the order-preserving stub keeps the rrf order") {
  PoolFixture f({{0.9, {}}, {0.8, {"Q1"}}, {0.7, {"Q1"}}, {0.6, {}}});
  RerankConfig cfg;
  cfg.cross_top_n = 3;
  OrderPreservingScorer stub;
  auto rrf = rerank_rrf(f.pool, {"Q1"}, f.lookup, cfg.rrf_k);
  auto crossed = rerank_rrf_cross(f.pool, "query", {"Q1"}, f.lookup, stub, cfg);
  REQUIRE(crossed.size() == 3);
  for (std::size_t i = 0; i < crossed.size(); ++i) {
    CHECK(crossed[i].chunk_id == rrf[i].chunk_id);
    CHECK(crossed[i].final_rank == int(i + 1));
  }
}

TEST_CASE("rerank_rrf_cross: token overlap stub promotes the overlapping chunk") {
  Corpus corpus;
  const char* texts[3] = {
      "la politica monetaria della banca centrale",
      "il segno linguistico e il suo significato",
      "grammatica del periodo ipotetico",
  };
  for (int i = 0; i < 3; ++i) {
    Chunk chunk;
    chunk.chunk_id = "c" + std::to_string(i);
    chunk.doc_id = "d";
    chunk.text = texts[i];
    chunk.token_count = 6;
    corpus.chunks.push_back(std::move(chunk));
  }
  ChunkLookup lookup = make_chunk_lookup(corpus);
  std::vector<DenseHit> pool{{"c2", 0.9, 1}, {"c1", 0.8, 2}, {"c0", 0.7, 3}};

  RerankConfig cfg;
  cfg.cross_top_n = 3;
  TokenOverlapScorer stub;
  auto out = rerank_rrf_cross(pool, "significato del segno linguistico", {}, lookup, stub, cfg);
  REQUIRE(out.size() == 3);
  CHECK(out[0].chunk_id == "c1");  // shares segno/linguistico/significato/del
}

TEST_CASE("rerank_rrf_cross with zero entities and the order stub reduces to dense order") {
  PoolFixture f({{0.9, {"Q5"}}, {0.8, {}}, {0.7, {"Q6"}}, {0.6, {}}});
  RerankConfig cfg;
  cfg.cross_top_n = 4;
  OrderPreservingScorer stub;
  auto out = rerank_rrf_cross(f.pool, "query", /*query_entities=*/{}, f.lookup, stub, cfg);
  CHECK(ids_of(out) == std::vector<std::string>{"c00", "c01", "c02", "c03"});
}

TEST_CASE("rerank_rrf_cross re-scores everything when the pool is smaller than cross_top_n") {
  PoolFixture f({{0.9, {}}, {0.8, {}}, {0.7, {}}});
  RerankConfig cfg;
  cfg.cross_top_n = 20;
  OrderPreservingScorer stub;
  auto out = rerank_rrf_cross(f.pool, "query", {}, f.lookup, stub, cfg);
  CHECK(out.size() == 3);
}

TEST_CASE("rerank_rrf_cross rejects a scorer response missing an id") {
  struct MissingIdScorer final : CrossScorer {
    std::vector<Scored> score(const std::string&,
                              const std::vector<Passage>& passages) const override {
      std::vector<Scored> out;
      for (std::size_t i = 0; i + 1 < passages.size(); ++i) out.push_back({passages[i].id, 1.0});
      return out;
    }
  };
  PoolFixture f({{0.9, {}}, {0.8, {}}});
  RerankConfig cfg;
  cfg.cross_top_n = 2;
  MissingIdScorer scorer;
  CHECK_THROWS_AS(rerank_rrf_cross(f.pool, "q", {}, f.lookup, scorer, cfg), DataError);
}
