#include "elrag/text.hpp"

#include <cctype>

namespace elrag {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Decodes the codepoint starting at text[pos] and reports whether it is an
// uppercase letter. Covers ASCII and the Latin-1 supplement block, which is
// enough for Italian (À È É Ì Ò Ù and friends).
bool starts_with_uppercase(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return false;
  unsigned char b0 = static_cast<unsigned char>(text[pos]);
  if (b0 < 0x80) return b0 >= 'A' && b0 <= 'Z';
  if ((b0 & 0xe0) == 0xc0 && pos + 1 < text.size()) {
    unsigned char b1 = static_cast<unsigned char>(text[pos + 1]);
    unsigned int cp = ((b0 & 0x1fu) << 6) | (b1 & 0x3fu);
    return cp >= 0xc0 && cp <= 0xde && cp != 0xd7;  // À..Þ minus ×
  }
  return false;
}

// The word that ends at text[dot_pos] ('.' included), lowercased.
std::string word_before_dot(std::string_view text, std::size_t dot_pos) {
  std::size_t start = dot_pos;
  while (start > 0 && !is_space(text[start - 1])) --start;
  return ascii_lower(text.substr(start, dot_pos - start + 1));
}

}  // namespace

SentenceSplitter::SentenceSplitter() : abbreviations_(default_abbreviations()) {}

SentenceSplitter::SentenceSplitter(std::unordered_set<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

std::unordered_set<std::string> SentenceSplitter::default_abbreviations() {
  return {
      "sig.",  "sigg.", "sig.ra", "dott.", "dott.ssa", "prof.", "prof.ssa",
      "ing.",  "avv.",  "ecc.",   "etc.",  "es.",      "ad.",   "art.",
      "n.",    "nn.",   "p.",     "pp.",   "pag.",     "cap.",  "vol.",
      "fig.",  "tab.",  "sec.",   "ca.",   "cfr.",     "mr.",   "mrs.",
      "dr.",   "st.",
  };
}

std::vector<SentenceSpan> SentenceSplitter::split(std::string_view text) const {
  std::vector<SentenceSpan> out;
  const std::size_t n = text.size();
  std::size_t pos = 0;

  while (pos < n) {
    while (pos < n && is_space(text[pos])) ++pos;
    if (pos >= n) break;
    std::size_t start = pos;
    std::size_t end = n;  // falls through to end-of-text when no boundary fires

    for (std::size_t i = start; i < n; ++i) {
      if (!is_terminal(text[i])) continue;
      std::size_t punct_end = i;
      while (punct_end + 1 < n && is_terminal(text[punct_end + 1])) ++punct_end;
      // A '.' that closes a stop-listed abbreviation is not a boundary.
      if (text[punct_end] == '.' &&
          abbreviations_.count(word_before_dot(text, punct_end)) > 0) {
        i = punct_end;
        continue;
      }
      std::size_t next = punct_end + 1;
      if (next >= n) {
        end = next;
        break;
      }
      if (is_space(text[next])) {
        std::size_t after_ws = next;
        while (after_ws < n && is_space(text[after_ws])) ++after_ws;
        if (after_ws >= n || starts_with_uppercase(text, after_ws)) {
          end = punct_end + 1;
          break;
        }
      }
      i = punct_end;
    }

    // Trim trailing whitespace from end-of-text sentences.
    std::size_t trimmed_end = end;
    while (trimmed_end > start && is_space(text[trimmed_end - 1])) --trimmed_end;
    if (trimmed_end > start) {
      out.push_back({std::string(text.substr(start, trimmed_end - start)), start, trimmed_end});
    }
    pos = end;
  }
  return out;
}

int count_tokens(std::string_view text) {
  int count = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace elrag
