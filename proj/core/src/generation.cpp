#include "elrag/generation.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "elrag/errors.hpp"
#include "elrag/text.hpp"

namespace elrag {

namespace {

// Minimal Italian/English function-word list for the extractive stub. Kept
// short on purpose: the stub only needs to ignore glue words when deciding
// whether a chunk shares content with the query.
const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words{
      "il",    "lo",   "la",    "i",     "gli",  "le",    "un",   "uno",  "una",
      "di",    "a",    "da",    "in",    "con",  "su",    "per",  "tra",  "fra",
      "del",   "della", "dello", "dei",  "degli", "delle", "al",  "alla", "allo",
      "ai",    "agli", "alle",  "dal",   "dalla", "nel",  "nella", "nei", "nelle",
      "e",     "ed",   "o",     "ma",    "che",  "chi",   "cosa", "come", "dove",
      "quando", "perche", "perché", "quale", "quali", "cos'e", "cos'è",
      "è",     "e'",   "sono",  "sia",   "era",  "essere", "ha",  "hanno", "si",
      "non",   "più",  "piu",   "anche", "ci",   "ne",    "se",   "questo",
      "questa", "questi", "queste", "quello", "quella", "sul",  "sulla",
      "the",   "a",    "an",    "of",    "to",   "is",    "are",  "was",  "what",
      "who",   "which", "and",  "or",    "in",   "on",    "for",
  };
  return words;
}

std::string strip_edge_punct(const std::string& token) {
  auto is_ascii_punct = [](unsigned char c) { return c < 0x80 && !std::isalnum(c); };
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && is_ascii_punct(static_cast<unsigned char>(token[begin]))) ++begin;
  while (end > begin && is_ascii_punct(static_cast<unsigned char>(token[end - 1]))) --end;
  return token.substr(begin, end - begin);
}

std::unordered_set<std::string> content_tokens(const std::string& text) {
  std::unordered_set<std::string> out;
  for (const auto& token : whitespace_tokens(text)) {
    std::string norm = ascii_lower(strip_edge_punct(token));
    if (!norm.empty() && stopwords().count(norm) == 0) out.insert(std::move(norm));
  }
  return out;
}

void replace_all(std::string& text, std::string_view needle, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
}

}  // namespace

std::string load_prompt_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open prompt template: " + path.string());
  std::string tmpl((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (const char* placeholder : {"{query}", "{chunks}"}) {
    if (tmpl.find(placeholder) == std::string::npos) {
      throw ConfigError("prompt template " + path.string() + " is missing the " + placeholder +
                        " placeholder");
    }
  }
  return tmpl;
}

std::string build_prompt(const std::string& query, const std::vector<ContextChunk>& chunks,
                         const std::string& prompt_template) {
  if (chunks.empty()) {
    throw std::invalid_argument("build_prompt: context chunk list is empty");
  }
  for (const char* placeholder : {"{query}", "{chunks}"}) {
    if (prompt_template.find(placeholder) == std::string::npos) {
      throw ConfigError(std::string("prompt template is missing the ") + placeholder +
                        " placeholder");
    }
  }
  std::string rendered_chunks;
  for (const auto& chunk : chunks) {
    rendered_chunks += "[[chunk:" + chunk.id + "]]\n" + chunk.text + "\n\n";
  }
  std::string prompt = prompt_template;
  replace_all(prompt, "{query}", query);
  replace_all(prompt, "{chunks}", rendered_chunks);
  return prompt;
}

GenerationResult parse_citations(const std::string& answer_text,
                                 const std::vector<std::string>& allowed_ids) {
  static constexpr std::string_view kOpen = "[cit:";
  GenerationResult result;
  result.answer_text = answer_text;
  result.abstained = answer_text.find(kAbstainSentinel) != std::string::npos;

  std::unordered_set<std::string> allowed(allowed_ids.begin(), allowed_ids.end());
  std::unordered_set<std::string> seen;
  std::size_t pos = 0;
  while ((pos = answer_text.find(kOpen, pos)) != std::string::npos) {
    std::size_t id_begin = pos + kOpen.size();
    std::size_t close = answer_text.find(']', id_begin);
    if (close == std::string::npos) break;
    std::string id = answer_text.substr(id_begin, close - id_begin);
    pos = close + 1;
    if (id.empty()) continue;
    if (allowed.count(id) == 0) {
      ++result.dropped_citations;
      continue;
    }
    if (seen.insert(id).second) {
      result.cited_chunk_ids.push_back(std::move(id));
    }
  }
  if (result.abstained) {
    result.cited_chunk_ids.clear();
  }
  return result;
}

std::string ExtractiveStubGenerator::generate_answer(const GenerationRequest& request) {
  std::unordered_set<std::string> query_tokens = content_tokens(request.query);
  std::vector<const ContextChunk*> cited;
  for (const auto& chunk : request.context) {
    std::unordered_set<std::string> chunk_tokens = content_tokens(chunk.text);
    for (const auto& token : query_tokens) {
      if (chunk_tokens.count(token) > 0) {
        cited.push_back(&chunk);
        break;
      }
    }
  }
  if (cited.empty()) {
    return std::string(kAbstainSentinel);
  }
  std::string answer = "Le informazioni pertinenti si trovano nei passaggi citati:";
  for (const ContextChunk* chunk : cited) {
    answer += " [cit:" + chunk->id + "]";
  }
  return answer;
}

GenerationResult generate(const GenerationRequest& request, GeneratorClient& client) {
  std::vector<std::string> allowed;
  allowed.reserve(request.context.size());
  for (const auto& chunk : request.context) allowed.push_back(chunk.id);
  return parse_citations(client.generate_answer(request), allowed);
}

GenerationRequest make_generation_request(const std::string& query,
                                          std::vector<ContextChunk> context,
                                          const std::string& prompt_template) {
  std::unordered_set<std::string> ids;
  for (const auto& chunk : context) {
    if (!ids.insert(chunk.id).second) {
      throw std::invalid_argument("duplicate context chunk id: " + chunk.id);
    }
  }
  GenerationRequest request;
  request.query = query;
  request.prompt = build_prompt(query, context, prompt_template);
  request.context = std::move(context);
  return request;
}

}  // namespace elrag
