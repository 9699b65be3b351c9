#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace elrag {

/// One sentence plus its byte span [begin, end) in the original text.
struct SentenceSpan {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Rule-based sentence splitter: a boundary is a run of terminal
/// punctuation (. ! ?) followed by whitespace and an uppercase letter, or by
/// end of text. A period does not end a sentence when the word it closes is
/// in the abbreviation stop-list.
class SentenceSplitter {
 public:
  SentenceSplitter();
  explicit SentenceSplitter(std::unordered_set<std::string> abbreviations);

  /// Splits text into sentences. Concatenating the returned spans with the
  /// original inter-sentence whitespace reconstructs the input; spans are
  /// ascending and non-overlapping. Empty or whitespace-only input yields
  /// an empty list.
  std::vector<SentenceSpan> split(std::string_view text) const;

  const std::unordered_set<std::string>& abbreviations() const { return abbreviations_; }

  /// Common Italian abbreviations (sig., dott., ecc., ...); the default set
  /// used when no stop-list is configured.
  static std::unordered_set<std::string> default_abbreviations();

 private:
  std::unordered_set<std::string> abbreviations_;  // lowercase, trailing '.'
};

/// Whitespace token count; punctuation stays attached to its token.
/// Runs of whitespace collapse, so "a  b\tc" counts 3.
int count_tokens(std::string_view text);

/// The whitespace tokens themselves, in order.
std::vector<std::string> whitespace_tokens(std::string_view text);

/// Lowercases ASCII letters in place-copy; bytes >= 0x80 pass through.
std::string ascii_lower(std::string_view text);

}  // namespace elrag
