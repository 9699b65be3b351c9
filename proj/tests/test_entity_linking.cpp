#include "doctest.h"
#include "elrag/entity_linking.hpp"
#include "elrag/errors.hpp"
#include "test_support.hpp"

#include <fstream>
#include <random>

using namespace elrag;

namespace {

FixtureCandidateSource fixture_from(const std::string& json) {
  static test_support::TempDir dir("linker_fixture");
  static int counter = 0;
  auto path = dir.path() / ("fixture_" + std::to_string(counter++) + ".json");
  std::ofstream out(path);
  out << json;
  out.close();
  return FixtureCandidateSource::load(path);
}

EntityMention mention_of(const std::string& surface, const std::string& context) {
  EntityMention m;
  m.surface = surface;
  m.sentence_context = context;
  auto pos = context.find(surface);
  m.span_begin = pos == std::string::npos ? 0 : pos;
  m.span_end = m.span_begin + surface.size();
  return m;
}

}  // namespace

TEST_CASE("gazetteer finds a known surface with its sentence context") {
  GazetteerMentionProvider provider({"Adam Smith"});
  auto mentions = provider.extract("Introduzione al corso. Secondo Adam Smith il mercato si coordina.");
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].surface == "Adam Smith");
  CHECK(mentions[0].sentence_context == "Secondo Adam Smith il mercato si coordina.");
}

TEST_CASE("gazetteer returns nothing on unmatched text") {
  GazetteerMentionProvider provider({"Keynes"});
  CHECK(provider.extract("una frase senza economisti").empty());
}

TEST_CASE("gazetteer prefers the longest overlapping surface") {
  GazetteerMentionProvider provider({"Smith", "Adam Smith"});
  auto mentions = provider.extract("Secondo Adam Smith il mercato...");
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].surface == "Adam Smith");

  mentions = provider.extract("Il solo Smith non basta, Adam Smith serve intero.");
  REQUIRE(mentions.size() == 2);
  CHECK(mentions[0].surface == "Smith");
  CHECK(mentions[1].surface == "Adam Smith");
}

TEST_CASE("gazetteer respects word boundaries") {
  GazetteerMentionProvider provider({"arte"});
  CHECK(provider.extract("la parte migliore").empty());
  CHECK(provider.extract("l'arte moderna").size() == 1);
}

TEST_CASE("gazetteer surfaces match byte spans") {
  GazetteerMentionProvider provider({"PIL"});
  std::string text = "La sigla PIL indica il prodotto interno lordo.";
  auto mentions = provider.extract(text);
  REQUIRE(mentions.size() == 1);
  CHECK(text.substr(mentions[0].span_begin, mentions[0].span_end - mentions[0].span_begin) ==
        "PIL");
}

TEST_CASE("gazetteer file loader ignores comments and qid hints") {
  test_support::TempDir dir("gaz");
  std::ofstream out(dir.path() / "gazetteer.txt");
  out << "# commento\nKeynes|Q9317\nAdam Smith\n\n";
  out.close();
  auto provider = GazetteerMentionProvider::load(dir.path() / "gazetteer.txt");
  REQUIRE(provider.surfaces().size() == 2);
  CHECK(provider.extract("Per Keynes la domanda conta.").size() == 1);
}

TEST_CASE("fixture candidate source: ranks, truncation, unknown surfaces") {
  auto source = fixture_from(R"({
    "Smith": [
      {"qid": "Q9381", "label": "Adam Smith", "description": "economista"},
      {"qid": "Q17515321", "label": "Smith", "description": "cognome"}
    ],
    "Vuoto": []
  })");
  auto candidates = source.fetch("Smith", 7, "it");
  REQUIRE(candidates.size() == 2);
  CHECK(candidates[0].api_rank == 0);
  CHECK(candidates[1].api_rank == 1);
  CHECK(candidates[0].qid == "Q9381");

  CHECK(source.fetch("Smith", 1, "it").size() == 1);
  CHECK(source.fetch("Vuoto", 7, "it").empty());
  CHECK(source.fetch("Sconosciuto", 7, "it").empty());
}

TEST_CASE("popularity is the inverse candidate rank") {
  CHECK(popularity(0) == 1.0);
  CHECK(popularity(1) == 0.5);
  CHECK(popularity(9) == doctest::Approx(0.1).epsilon(1e-12));
  for (int rank = 0; rank < 20; ++rank) {
    CHECK(popularity(rank) > popularity(rank + 1));
  }
}

TEST_CASE("hybrid_score blends similarity and popularity") {
  CHECK(hybrid_score(0.9, 0.8, 1) == doctest::Approx(0.77).epsilon(1e-12));
  CHECK(hybrid_score(1.0, 0.3, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(hybrid_score(0.0, 0.3, 2) == doctest::Approx(popularity(2)).epsilon(1e-12));
}

TEST_CASE("score_candidate combines similarity and popularity per the alpha blend") {
  // self-similarity context==label+desc gives similarity 1
  HashEmbedder embedder(128, 42);
  EntityCandidate candidate{"Q1", "mano invisibile", "metafora del mercato", 1};
  EntityMention mention = mention_of("mano invisibile", "mano invisibile metafora del mercato");

  LinkerConfig cfg;
  cfg.alpha = 0.9;
  auto score = score_candidate(mention, candidate, embedder, cfg);
  CHECK(score.similarity == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(score.hybrid == doctest::Approx(0.9 * score.similarity + 0.1 * 0.5).epsilon(1e-12));

  cfg.alpha = 1.0;
  CHECK(score_candidate(mention, candidate, embedder, cfg).hybrid ==
        doctest::Approx(score.similarity).epsilon(1e-12));
  cfg.alpha = 0.0;
  CHECK(score_candidate(mention, candidate, embedder, cfg).hybrid ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("link_mention picks the hybrid argmax and applies tie-breaks") {
  auto source = fixture_from(R"({
    "Smith": [
      {"qid": "Q9381", "label": "Adam Smith", "description": "economista scozzese teoria del valore"},
      {"qid": "Q40096", "label": "Will Smith", "description": "attore statunitense"}
    ]
  })");
  HashEmbedder embedder(256, 42);
  GazetteerMentionProvider mentions({"Smith"});
  LinkerConfig cfg;
  EntityLinker linker(mentions, source, embedder, cfg);

  // economics context selects the economist
  auto linked = linker.link_mention(mention_of("Smith", "Smith e la teoria del valore"));
  REQUIRE(linked.has_value());
  CHECK(linked->qid == "Q9381");
  CHECK(linked->popularity == 1.0);
  CHECK(linked->hybrid_score ==
        doctest::Approx(0.9 * linked->similarity + 0.1 * linked->popularity).epsilon(1e-12));

  // cinema context selects the actor despite the lower popularity
  linked = linker.link_mention(mention_of("Smith", "Smith attore statunitense del cinema"));
  REQUIRE(linked.has_value());
  CHECK(linked->qid == "Q40096");
}

TEST_CASE("link_mention: alpha collapse identities") {
  auto source = fixture_from(R"({
    "X": [
      {"qid": "Q1", "label": "uno", "description": "argomento alfa"},
      {"qid": "Q2", "label": "due", "description": "argomento beta"}
    ]
  })");
  HashEmbedder embedder(128, 42);
  GazetteerMentionProvider mentions({"X"});

  // alpha=0: always the api_rank 0 candidate, whatever the context
  LinkerConfig by_rank;
  by_rank.alpha = 0.0;
  EntityLinker rank_linker(mentions, source, embedder, by_rank);
  auto linked = rank_linker.link_mention(mention_of("X", "X argomento beta"));
  REQUIRE(linked.has_value());
  CHECK(linked->qid == "Q1");

  // alpha=1: the similarity argmax
  LinkerConfig by_sim;
  by_sim.alpha = 1.0;
  EntityLinker sim_linker(mentions, source, embedder, by_sim);
  linked = sim_linker.link_mention(mention_of("X", "due argomento beta"));
  REQUIRE(linked.has_value());
  CHECK(linked->qid == "Q2");
}

TEST_CASE("link_mention: equal hybrids fall back to the lower api_rank") {
  // identical label+description means identical similarity; popularity
  // breaks the tie only under alpha=1 where both terms are equal
  auto source = fixture_from(R"({
    "X": [
      {"qid": "Q7", "label": "gemello", "description": "stessa descrizione"},
      {"qid": "Q8", "label": "gemello", "description": "stessa descrizione"}
    ]
  })");
  HashEmbedder embedder(64, 42);
  GazetteerMentionProvider mentions({"X"});
  LinkerConfig cfg;
  cfg.alpha = 1.0;
  EntityLinker linker(mentions, source, embedder, cfg);
  auto linked = linker.link_mention(mention_of("X", "X gemello"));
  REQUIRE(linked.has_value());
  CHECK(linked->qid == "Q7");
}

TEST_CASE("link_mention returns none without candidates") {
  auto source = fixture_from(R"({})");
  HashEmbedder embedder(64, 42);
  GazetteerMentionProvider mentions({"X"});
  EntityLinker linker(mentions, source, embedder, LinkerConfig{});
  CHECK_FALSE(linker.link_mention(mention_of("X", "X")).has_value());
}

TEST_CASE("link_chunk deduplicates by qid keeping the best hybrid and is idempotent") {
  auto source = fixture_from(R"({
    "Keynes": [{"qid": "Q9317", "label": "John Maynard Keynes", "description": "economista della domanda aggregata"}],
    "John Maynard Keynes": [{"qid": "Q9317", "label": "John Maynard Keynes", "description": "economista della domanda aggregata"}]
  })");
  HashEmbedder embedder(128, 42);
  GazetteerMentionProvider mentions({"Keynes", "John Maynard Keynes"});
  EntityLinker linker(mentions, source, embedder, LinkerConfig{});

  Chunk chunk;
  chunk.chunk_id = "c1";
  chunk.doc_id = "d";
  chunk.text = "John Maynard Keynes rivoluziona la teoria. Secondo Keynes la domanda aggregata domina.";
  chunk.token_count = 12;

  Chunk linked = linker.link_chunk(chunk);
  CHECK(linked.mentions.size() == 2);
  REQUIRE(linked.linked_entities.size() == 1);
  CHECK(linked.linked_entities[0].qid == "Q9317");

  Chunk again = linker.link_chunk(linked);
  CHECK(again == linked);
}

TEST_CASE("link_query returns the deduplicated qid set") {
  auto source = fixture_from(R"({
    "PIL": [{"qid": "Q12638", "label": "prodotto interno lordo", "description": "misura della produzione"}],
    "inflazione": [{"qid": "Q35865", "label": "inflazione", "description": "aumento dei prezzi"}]
  })");
  HashEmbedder embedder(128, 42);
  GazetteerMentionProvider mentions({"PIL", "inflazione"});
  EntityLinker linker(mentions, source, embedder, LinkerConfig{});

  auto qids = linker.link_query("Come incide la inflazione sul PIL e ancora sul PIL");
  CHECK(qids == std::set<std::string>{"Q12638", "Q35865"});
  CHECK(linker.link_query("query senza menzioni").empty());
}

TEST_CASE("hybrid score is monotone in similarity for fixed popularity") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> rank(0, 6);
  for (int i = 0; i < 200; ++i) {
    double alpha = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    double s1 = unit(rng);
    double s2 = unit(rng);
    int r = rank(rng);
    double h1 = alpha * s1 + (1 - alpha) * popularity(r);
    double h2 = alpha * s2 + (1 - alpha) * popularity(r);
    if (s1 < s2) {
      CHECK(h1 < h2);
    } else if (s1 > s2) {
      CHECK(h1 > h2);
    }
  }
}
