// Microbenchmarks for the hot retrieval paths: flat search, fusion, and the
// ingestion chunker. Sizes roughly match a desk-scale corpus.

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "elrag/chunker.hpp"
#include "elrag/dense_index.hpp"
#include "elrag/embedding.hpp"
#include "elrag/reranking.hpp"

namespace {

using namespace elrag;

Corpus synthetic_corpus(int n_chunks, int words_per_chunk) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> word(0, 4999);
  Corpus corpus;
  for (int i = 0; i < n_chunks; ++i) {
    Chunk chunk;
    char id[16];
    std::snprintf(id, sizeof(id), "b%05d", i);
    chunk.chunk_id = id;
    chunk.doc_id = "bench";
    std::ostringstream text;
    for (int w = 0; w < words_per_chunk; ++w) text << "w" << word(rng) << ' ';
    chunk.text = text.str();
    chunk.token_count = words_per_chunk;
    if (i % 4 == 0) {
      LinkedEntity entity;
      entity.qid = "Q" + std::to_string(i % 8);
      chunk.linked_entities.push_back(std::move(entity));
    }
    corpus.chunks.push_back(std::move(chunk));
  }
  return corpus;
}

void BM_HashEmbed(benchmark::State& state) {
  HashEmbedder embedder(1024, 42);
  std::string text =
      "una frase di lunghezza tipica per un chunk di lezione universitaria "
      "con un lessico abbastanza vario da riempire i bucket";
  for (auto _ : state) {
    benchmark::DoNotOptimize(embedder.embed(text));
  }
}
BENCHMARK(BM_HashEmbed);

void BM_DenseSearch(benchmark::State& state) {
  const int rows = int(state.range(0));
  Corpus corpus = synthetic_corpus(rows, 40);
  HashEmbedder embedder(256, 42);
  DenseIndex index = DenseIndex::build(corpus, embedder);
  EmbeddingVector query = embedder.embed("w10 w42 w99 w4000 w123 w77 w31");
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.search(query, 10));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_DenseSearch)->Arg(500)->Arg(2000)->Arg(8000);

void BM_RerankRRF(benchmark::State& state) {
  Corpus corpus = synthetic_corpus(64, 8);
  ChunkLookup lookup = make_chunk_lookup(corpus);
  std::vector<DenseHit> pool;
  for (int i = 0; i < 50; ++i) {
    pool.push_back({corpus.chunks[size_t(i)].chunk_id, 1.0 - 0.01 * i, i + 1});
  }
  std::set<std::string> query_entities{"Q0", "Q3"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rerank_rrf(pool, query_entities, lookup, 60));
  }
}
BENCHMARK(BM_RerankRRF);

void BM_RerankWeighted(benchmark::State& state) {
  Corpus corpus = synthetic_corpus(64, 8);
  ChunkLookup lookup = make_chunk_lookup(corpus);
  std::vector<DenseHit> pool;
  for (int i = 0; i < 30; ++i) {
    pool.push_back({corpus.chunks[size_t(i)].chunk_id, 1.0 - 0.01 * i, i + 1});
  }
  std::set<std::string> query_entities{"Q0", "Q3"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rerank_weighted(pool, query_entities, lookup, 0.5));
  }
}
BENCHMARK(BM_RerankWeighted);

void BM_ChunkTranscript(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> tokens(6, 60);
  std::vector<TranscriptSegment> segments;
  for (int i = 0; i < 500; ++i) {
    std::ostringstream text;
    int n = tokens(rng);
    for (int t = 0; t < n - 1; ++t) text << "parola" << t << ' ';
    text << "fine.";
    segments.push_back({"doc", text.str(), double(i), double(i + 1)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(chunk_transcript(segments));
  }
}
BENCHMARK(BM_ChunkTranscript);

}  // namespace

BENCHMARK_MAIN();
