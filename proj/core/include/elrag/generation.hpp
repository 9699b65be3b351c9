#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace elrag {

/// Exact sentinel the generator must output when the context lacks
/// sufficient evidence.
inline constexpr std::string_view kAbstainSentinel = "NO_RELEVANT_INFORMATION";

struct ContextChunk {
  std::string id;
  std::string text;
};

struct GenerationRequest {
  std::string query;
  std::vector<ContextChunk> context;  // non-empty, unique ids
  std::string prompt;                 // rendered from the template
};

struct GenerationResult {
  std::string answer_text;
  std::vector<std::string> cited_chunk_ids;  // deduplicated, first-mention order
  bool abstained = false;
  int dropped_citations = 0;  // citations outside the context, dropped with a warning count
};

/// Reads a prompt template and validates that it contains the {query} and
/// {chunks} placeholders; a missing placeholder raises ConfigError.
std::string load_prompt_template(const std::filesystem::path& path);

/// Deterministic rendering: each context chunk appears once, delimited by a
/// [[chunk:<id>]] marker; the template's instructions demand [cit:<id>]
/// citations and the abstention sentinel. Empty context raises
/// std::invalid_argument; a template missing a placeholder raises
/// ConfigError.
std::string build_prompt(const std::string& query, const std::vector<ContextChunk>& chunks,
                         const std::string& prompt_template);

/// Extracts [cit:<id>] tokens in order, deduplicates keeping the first
/// occurrence, and drops ids outside allowed_ids (counted, not fatal).
/// abstained is true when the answer contains the sentinel; an abstained
/// answer cites nothing. Parsing is total.
GenerationResult parse_citations(const std::string& answer_text,
                                 const std::vector<std::string>& allowed_ids);

/// Generator contract: produce the raw answer text for a request. The model
/// lives out of process; this artifact ships a deterministic stub and an
/// HTTP client.
class GeneratorClient {
 public:
  virtual ~GeneratorClient() = default;
  virtual std::string generate_answer(const GenerationRequest& request) = 0;
};

/// Deterministic, seed-free stub: cites every context chunk sharing at
/// least one non-stopword token with the query (in context order) and
/// abstains when none does.
class ExtractiveStubGenerator final : public GeneratorClient {
 public:
  std::string generate_answer(const GenerationRequest& request) override;
};

/// Runs the client and parses its citations against the request context.
GenerationResult generate(const GenerationRequest& request, GeneratorClient& client);

/// Convenience: renders the prompt and assembles the request.
GenerationRequest make_generation_request(const std::string& query,
                                          std::vector<ContextChunk> context,
                                          const std::string& prompt_template);

}  // namespace elrag
