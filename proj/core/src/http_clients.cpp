#include "elrag/http_clients.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include "elrag/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace elrag {

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("invalid endpoint URL (expected scheme://host/path): " + url);
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// POSTs a JSON body with bounded retries; network failures and HTTP >= 400
// retry, then surface as TransportError. Returns the response body.
std::string post_json(const HttpEndpointOptions& options, const std::string& body,
                      const httplib::Headers& headers) {
  SplitUrl url = split_url(options.url);
  std::string last_error;
  const int attempts = options.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options.retry_backoff_ms << (attempt - 1)));
    }
    httplib::Client client(url.base);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    httplib::Result res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 400) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    return res->body;
  }
  throw TransportError("POST " + options.url + " failed after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

void append_audit_line(const std::optional<std::filesystem::path>& log,
                       const std::string& url, const nlohmann::json& request,
                       const std::string& response_body) {
  if (!log) return;
  std::ofstream out(*log, std::ios::binary | std::ios::app);
  nlohmann::ordered_json line{
      {"url", url},
      {"request", request},
      {"response", response_body},
  };
  out << line.dump() << '\n';
}

std::string chat_completion(const HttpGeneratorOptions& options, const std::string& prompt) {
  nlohmann::ordered_json request{
      {"model", options.model},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
  };
  httplib::Headers headers;
  if (const char* key = std::getenv(options.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  std::string body = post_json(options.endpoint, request.dump(), headers);
  append_audit_line(options.audit_log, options.endpoint.url, request, body);

  nlohmann::json response;
  try {
    response = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed generator response: ") + e.what());
  }
  try {
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("generator response missing choices[0].message.content");
  }
}

}  // namespace

std::vector<CrossScorer::Scored> HttpCrossScorer::score(
    const std::string& query, const std::vector<Passage>& passages) const {
  nlohmann::ordered_json request{{"query", query}, {"passages", nlohmann::ordered_json::array()}};
  for (const auto& passage : passages) {
    request["passages"].push_back({{"id", passage.id}, {"text", passage.text}});
  }
  std::string body = post_json(options_, request.dump(), {});

  nlohmann::json response;
  try {
    response = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed cross-scorer response: ") + e.what());
  }
  if (!response.is_object() || !response.contains("scores") || !response["scores"].is_array()) {
    throw TransportError("cross-scorer response missing \"scores\" array");
  }
  std::vector<Scored> out;
  for (const auto& item : response["scores"]) {
    if (!item.contains("id") || !item.contains("score")) {
      throw TransportError("cross-scorer score entry missing id or score");
    }
    out.push_back({item["id"].get<std::string>(), item["score"].get<double>()});
  }
  return out;
}

std::string HttpGeneratorClient::generate_answer(const GenerationRequest& request) {
  return chat_completion(options_, request.prompt);
}

std::string HttpJudgeClient::judge(const std::string& prompt) {
  return chat_completion(options_, prompt);
}

}  // namespace elrag
