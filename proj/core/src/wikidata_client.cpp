#include "elrag/wikidata_client.hpp"

#include <fstream>
#include <thread>

#include "elrag/digest.hpp"
#include "elrag/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace elrag {

namespace {

std::vector<EntityCandidate> parse_search_response(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed entity-search response: ") + e.what());
  }
  auto it = doc.find("search");
  if (it == doc.end() || !it->is_array()) {
    throw TransportError("entity-search response missing \"search\" array");
  }
  std::vector<EntityCandidate> candidates;
  int rank = 0;
  for (const auto& item : *it) {
    EntityCandidate c;
    c.qid = item.value("id", std::string{});
    c.label = item.value("label", std::string{});
    c.description = item.value("description", std::string{});
    c.api_rank = rank++;
    candidates.push_back(std::move(c));
  }
  return candidates;
}

}  // namespace

WikidataClient::WikidataClient(WikidataClientOptions options) : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("invalid knowledge-base endpoint (expected scheme://host/path): " + url);
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_url_ = url;
    api_path_ = "/";
  } else {
    base_url_ = url.substr(0, path_start);
    api_path_ = url.substr(path_start);
  }
}

void WikidataClient::wait_for_rate_limit() const {
  if (options_.requests_per_second <= 0) return;
  const auto min_interval =
      std::chrono::duration<double>(1.0 / options_.requests_per_second);
  std::unique_lock lock(rate_mutex_);
  auto now = std::chrono::steady_clock::now();
  if (last_request_.time_since_epoch().count() != 0) {
    auto next_allowed =
        last_request_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(min_interval);
    if (now < next_allowed) {
      std::this_thread::sleep_for(next_allowed - now);
      now = std::chrono::steady_clock::now();
    }
  }
  last_request_ = now;
}

std::filesystem::path WikidataClient::cache_path(const std::string& surface,
                                                 const std::string& language) const {
  std::string key = language;
  key.push_back('\x1f');
  key += surface;
  return *options_.cache_dir / (sha256_hex16(key) + ".json");
}

std::vector<EntityCandidate> WikidataClient::fetch(const std::string& surface, int max_candidates,
                                                   const std::string& language) const {
  std::vector<EntityCandidate> candidates;
  bool from_cache = false;
  if (options_.cache_dir) {
    std::ifstream in(cache_path(surface, language), std::ios::binary);
    if (in) {
      std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      candidates = parse_search_response(body);
      from_cache = true;
    }
  }
  if (!from_cache) {
    candidates = fetch_remote(surface, max_candidates, language);
  }
  if (static_cast<int>(candidates.size()) > max_candidates) {
    candidates.resize(static_cast<std::size_t>(max_candidates));
  }
  return candidates;
}

std::vector<EntityCandidate> WikidataClient::fetch_remote(const std::string& surface,
                                                          int max_candidates,
                                                          const std::string& language) const {
  httplib::Params params{
      {"action", "wbsearchentities"},
      {"format", "json"},
      {"language", language},
      {"uselang", language},
      {"limit", std::to_string(max_candidates)},
      {"search", surface},
  };
  const std::string path = httplib::append_query_params(api_path_, params);

  std::string body;
  std::string last_error;
  int attempts = options_.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options_.retry_backoff_ms << (attempt - 1)));
    }
    wait_for_rate_limit();
    httplib::Client client(base_url_);
    client.set_follow_location(true);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    request_count_.fetch_add(1);
    httplib::Result res = client.Get(path);
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 400) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    body = res->body;
    last_error.clear();
    break;
  }
  if (!last_error.empty()) {
    throw TransportError("entity search for \"" + surface + "\" failed after " +
                         std::to_string(attempts) + " attempts: " + last_error);
  }

  std::vector<EntityCandidate> candidates = parse_search_response(body);
  if (options_.cache_dir) {
    std::filesystem::create_directories(*options_.cache_dir);
    auto path_final = cache_path(surface, language);
    // unique temp name per writer, then an atomic rename, so concurrent
    // fetches of the same surface cannot interleave
    static std::atomic<unsigned> tmp_counter{0};
    auto path_tmp = path_final;
    path_tmp += ".tmp" + std::to_string(tmp_counter.fetch_add(1));
    {
      std::ofstream out(path_tmp, std::ios::binary);
      out << body;
    }
    std::filesystem::rename(path_tmp, path_final);
  }
  return candidates;
}

}  // namespace elrag
