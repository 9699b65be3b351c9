#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "elrag/evaluation.hpp"
#include "elrag/generation.hpp"
#include "elrag/reranking.hpp"

namespace elrag {

struct HttpEndpointOptions {
  std::string url;             // scheme://host[:port]/path
  int max_retries = 3;         // additional attempts after the first
  int retry_backoff_ms = 250;  // doubled per retry
};

/// Remote cross-scorer speaking the wire contract
///   request:  {"query": str, "passages": [{"id": str, "text": str}]}
///   response: {"scores": [{"id": str, "score": float}]}
/// Transport failures and malformed responses raise TransportError; the
/// caller never falls back to the unscored order.
class HttpCrossScorer final : public CrossScorer {
 public:
  explicit HttpCrossScorer(HttpEndpointOptions options) : options_(std::move(options)) {}

  std::vector<Scored> score(const std::string& query,
                            const std::vector<Passage>& passages) const override;

 private:
  HttpEndpointOptions options_;
};

struct HttpGeneratorOptions {
  HttpEndpointOptions endpoint;
  std::string model;
  std::string api_key_env = "ELRAG_API_KEY";  // secrets come from the environment only
  std::optional<std::filesystem::path> audit_log;  // JSON-lines request/response log
};

/// Chat-completion style generator client: posts the rendered prompt as a
/// single user message and returns choices[0].message.content. Every
/// exchange is appended to the audit log when one is configured.
class HttpGeneratorClient final : public GeneratorClient {
 public:
  explicit HttpGeneratorClient(HttpGeneratorOptions options) : options_(std::move(options)) {}

  std::string generate_answer(const GenerationRequest& request) override;

 private:
  HttpGeneratorOptions options_;
};

/// Judge client over the same chat-completion contract; returns the raw
/// model output for parse_judge_response.
class HttpJudgeClient final : public JudgeClient {
 public:
  explicit HttpJudgeClient(HttpGeneratorOptions options) : options_(std::move(options)) {}

  std::string judge(const std::string& prompt) override;

 private:
  HttpGeneratorOptions options_;
};

}  // namespace elrag
