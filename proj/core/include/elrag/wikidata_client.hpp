#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "elrag/entity_linking.hpp"

namespace elrag {

struct WikidataClientOptions {
  std::string endpoint = "https://www.wikidata.org/w/api.php";
  int max_retries = 3;           // additional attempts after the first
  int retry_backoff_ms = 250;    // doubled on every retry
  double requests_per_second = 2.0;
  std::optional<std::filesystem::path> cache_dir;  // response cache, keyed by (surface, language)
};

/// Live candidate source against the knowledge-base entity-search endpoint
/// (action=wbsearchentities). Requests are serialized through a client-side
/// rate limiter; responses are cached on disk when a cache_dir is set.
/// Network failures and HTTP status >= 400 are retried with exponential
/// backoff and surface as TransportError once retries are exhausted.
class WikidataClient final : public CandidateSource {
 public:
  explicit WikidataClient(WikidataClientOptions options);

  std::vector<EntityCandidate> fetch(const std::string& surface, int max_candidates,
                                     const std::string& language) const override;

  /// HTTP requests actually sent (cache hits excluded).
  int request_count() const { return request_count_.load(); }

  const WikidataClientOptions& options() const { return options_; }

 private:
  std::vector<EntityCandidate> fetch_remote(const std::string& surface, int max_candidates,
                                            const std::string& language) const;
  std::filesystem::path cache_path(const std::string& surface, const std::string& language) const;
  void wait_for_rate_limit() const;

  WikidataClientOptions options_;
  std::string base_url_;   // scheme://host[:port]
  std::string api_path_;   // path component of the endpoint
  mutable std::mutex rate_mutex_;
  mutable std::chrono::steady_clock::time_point last_request_{};
  mutable std::atomic<int> request_count_{0};
};

}  // namespace elrag
