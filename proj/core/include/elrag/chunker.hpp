#pragma once

#include <vector>

#include "elrag/corpus.hpp"
#include "elrag/text.hpp"

namespace elrag {

struct ChunkerOptions {
  int min_tokens = 20;
  int max_tokens = 300;
  SentenceSplitter splitter;
};

/// Groups whole sentences into chunks, greedily left to right: a sentence is
/// appended while the running token count stays within max_tokens. Chunks
/// never cross document boundaries, sentences are never split, and chunk
/// timestamps cover the min/max of the segments they draw from.
///
/// Bound exceptions are flagged instead of violated: a trailing chunk below
/// min_tokens gets flags.short, and a single sentence longer than max_tokens
/// is emitted alone with flags.oversized.
///
/// Segments must arrive sorted by start_time within each doc_id; out-of-order
/// input raises DataError naming the document.
std::vector<Chunk> chunk_transcript(const std::vector<TranscriptSegment>& segments,
                                    const ChunkerOptions& options = {});

}  // namespace elrag
