#include "doctest.h"
#include "elrag/chunker.hpp"
#include "elrag/errors.hpp"
#include "elrag/text.hpp"

#include <random>
#include <sstream>

using namespace elrag;

namespace {

std::string sentence_of(int tokens, int salt) {
  std::ostringstream out;
  for (int i = 0; i < tokens - 1; ++i) {
    out << "parola" << salt << "x" << i << ' ';
  }
  out << "fine.";
  return out.str();
}

// Whitespace-normalized view of a string.
std::string normalized(const std::string& text) {
  std::string out;
  for (const auto& token : whitespace_tokens(text)) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

}  // namespace

TEST_CASE("chunk_transcript groups sentences greedily up to max_tokens") {
  // three 10-token sentences fit one chunk under [20, 300]
  std::vector<TranscriptSegment> segments;
  for (int i = 0; i < 3; ++i) {
    segments.push_back({"doc", sentence_of(10, i), double(i), double(i + 1)});
  }
  auto chunks = chunk_transcript(segments);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].token_count == 30);
  CHECK(chunks[0].doc_id == "doc");
  CHECK(chunks[0].start_time == 0.0);
  CHECK(chunks[0].end_time == 3.0);
  CHECK_FALSE(chunks[0].flags.short_chunk);
  CHECK_FALSE(chunks[0].flags.oversized);
  CHECK(chunks[0].mentions.empty());
  CHECK(chunks[0].linked_entities.empty());
}

TEST_CASE("chunk_transcript emits an oversized single sentence alone, flagged") {
  std::vector<TranscriptSegment> segments{{"doc", sentence_of(400, 0), 0.0, 9.0}};
  auto chunks = chunk_transcript(segments);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].token_count == 400);
  CHECK(chunks[0].flags.oversized);
}

TEST_CASE("chunk_transcript: empty input, empty output") {
  CHECK(chunk_transcript({}).empty());
}

TEST_CASE("chunk_transcript flags a sub-minimum trailing chunk") {
  std::vector<TranscriptSegment> segments{
      {"doc", sentence_of(250, 0), 0.0, 1.0},
      {"doc", sentence_of(60, 1), 1.0, 2.0},
      {"doc", sentence_of(10, 2), 2.0, 3.0},
  };
  auto chunks = chunk_transcript(segments);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].token_count == 250);
  CHECK(chunks[1].token_count == 70);
  CHECK_FALSE(chunks[1].flags.short_chunk);

  segments.push_back({"doc", sentence_of(297, 3), 3.0, 4.0});
  segments.push_back({"doc", sentence_of(5, 4), 4.0, 5.0});
  chunks = chunk_transcript(segments);
  REQUIRE(chunks.size() == 4);
  CHECK(chunks.back().token_count == 5);
  CHECK(chunks.back().flags.short_chunk);
}

TEST_CASE("chunk_transcript rejects unsorted segments naming the document") {
  std::vector<TranscriptSegment> segments{
      {"lect07", sentence_of(10, 0), 5.0, 6.0},
      {"lect07", sentence_of(10, 1), 1.0, 2.0},
  };
  CHECK_THROWS_WITH_AS(chunk_transcript(segments),
                       doctest::Contains("lect07"), DataError);
}

TEST_CASE("chunk_transcript never merges across documents") {
  std::vector<TranscriptSegment> segments{
      {"a", sentence_of(10, 0), 0.0, 1.0},
      {"b", sentence_of(10, 1), 0.0, 1.0},
  };
  auto chunks = chunk_transcript(segments);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].doc_id == "a");
  CHECK(chunks[1].doc_id == "b");
  CHECK(chunks[0].chunk_id != chunks[1].chunk_id);
}

TEST_CASE("chunker contract on a 50-sentence synthetic transcript") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> tokens(4, 80);
  std::vector<TranscriptSegment> segments;
  std::string full_text;
  for (int i = 0; i < 50; ++i) {
    std::string text = sentence_of(tokens(rng), i);
    full_text += (i ? " " : "") + text;
    segments.push_back({"lecture", text, double(i), double(i + 1)});
  }

  auto chunks = chunk_transcript(segments);
  REQUIRE(!chunks.empty());

  SentenceSplitter splitter;
  std::string rebuilt;
  double previous_start = 0.0;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const Chunk& chunk = chunks[i];
    if (!chunk.flags.short_chunk && !chunk.flags.oversized) {
      CHECK(chunk.token_count >= 20);
      CHECK(chunk.token_count <= 300);
    }
    // no sentence was split: re-splitting the chunk text yields whole
    // sentences whose concatenation is the chunk text
    auto sentences = splitter.split(chunk.text);
    std::string joined;
    for (const auto& s : sentences) {
      if (!joined.empty()) joined += ' ';
      joined += s.text;
    }
    CHECK(normalized(joined) == normalized(chunk.text));
    rebuilt += (rebuilt.empty() ? "" : " ") + chunk.text;
    CHECK(chunk.start_time >= previous_start);
    previous_start = chunk.start_time;
  }
  CHECK(normalized(rebuilt) == normalized(full_text));
}

TEST_CASE("chunk_transcript is deterministic") {
  std::vector<TranscriptSegment> segments;
  for (int i = 0; i < 20; ++i) {
    segments.push_back({"doc", sentence_of(15, i), double(i), double(i + 1)});
  }
  auto a = chunk_transcript(segments);
  auto b = chunk_transcript(segments);
  CHECK(a == b);
}
