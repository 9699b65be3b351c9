#include "elrag/chunker.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "elrag/errors.hpp"

namespace elrag {

namespace {

struct PendingSentence {
  std::string text;
  int tokens = 0;
  double start_time = 0.0;
  double end_time = 0.0;
};

class ChunkBuilder {
 public:
  ChunkBuilder(std::string doc_id, const ChunkerOptions& options, std::vector<Chunk>& out)
      : doc_id_(std::move(doc_id)), options_(options), out_(out) {}

  void add(PendingSentence s) {
    if (s.tokens > options_.max_tokens) {
      flush();
      emit({std::move(s)}, /*oversized=*/true);
      return;
    }
    if (!current_.empty() && current_tokens_ + s.tokens > options_.max_tokens) {
      flush();
    }
    current_tokens_ += s.tokens;
    current_.push_back(std::move(s));
  }

  void flush() {
    if (current_.empty()) return;
    emit(std::move(current_), /*oversized=*/false);
    current_.clear();
    current_tokens_ = 0;
  }

 private:
  void emit(std::vector<PendingSentence> sentences, bool oversized) {
    Chunk chunk;
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "-%04d", next_index_++);
    chunk.chunk_id = doc_id_ + suffix;
    chunk.doc_id = doc_id_;
    chunk.start_time = sentences.front().start_time;
    chunk.end_time = sentences.front().end_time;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (i > 0) chunk.text += ' ';
      chunk.text += sentences[i].text;
      chunk.start_time = std::min(chunk.start_time, sentences[i].start_time);
      chunk.end_time = std::max(chunk.end_time, sentences[i].end_time);
    }
    chunk.token_count = count_tokens(chunk.text);
    chunk.flags.oversized = oversized;
    chunk.flags.short_chunk = chunk.token_count < options_.min_tokens;
    out_.push_back(std::move(chunk));
  }

  std::string doc_id_;
  const ChunkerOptions& options_;
  std::vector<Chunk>& out_;
  std::vector<PendingSentence> current_;
  int current_tokens_ = 0;
  int next_index_ = 0;
};

}  // namespace

std::vector<Chunk> chunk_transcript(const std::vector<TranscriptSegment>& segments,
                                    const ChunkerOptions& options) {
  if (options.min_tokens > options.max_tokens) {
    throw std::invalid_argument("chunk_transcript: min_tokens > max_tokens");
  }

  // Group segments by doc_id in order of first appearance, checking the
  // sortedness precondition per document.
  std::vector<std::string> doc_order;
  std::unordered_map<std::string, std::vector<const TranscriptSegment*>> by_doc;
  for (const auto& seg : segments) {
    if (seg.end_time < seg.start_time) {
      throw DataError("segment with end_time < start_time in doc " + seg.doc_id);
    }
    auto& list = by_doc[seg.doc_id];
    if (list.empty()) doc_order.push_back(seg.doc_id);
    if (!list.empty() && seg.start_time < list.back()->start_time) {
      throw DataError("segments not sorted by start_time in doc " + seg.doc_id);
    }
    list.push_back(&seg);
  }

  std::vector<Chunk> chunks;
  for (const auto& doc_id : doc_order) {
    ChunkBuilder builder(doc_id, options, chunks);
    for (const TranscriptSegment* seg : by_doc[doc_id]) {
      for (const SentenceSpan& sentence : options.splitter.split(seg->text)) {
        builder.add({sentence.text, count_tokens(sentence.text), seg->start_time, seg->end_time});
      }
    }
    builder.flush();
  }
  return chunks;
}

}  // namespace elrag
