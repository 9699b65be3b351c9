#include "doctest.h"
#include "elrag/errors.hpp"
#include "elrag/generation.hpp"
#include "elrag/http_clients.hpp"
#include "test_support.hpp"

#include <atomic>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

using namespace elrag;

namespace {

const std::string kTemplate =
    "Rispondi alla domanda citando i passaggi con [cit:<id>], oppure scrivi "
    "NO_RELEVANT_INFORMATION.\n\nDomanda: {query}\n\nPassaggi:\n{chunks}";

std::vector<ContextChunk> two_chunks() {
  return {{"c1", "Il PIL misura la produzione."}, {"c2", "Il segno linguistico è arbitrario."}};
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("build_prompt renders each chunk marker exactly once") {
  std::string prompt = build_prompt("Che cosa misura il PIL", two_chunks(), kTemplate);
  CHECK(count_occurrences(prompt, "[[chunk:c1]]") == 1);
  CHECK(count_occurrences(prompt, "[[chunk:c2]]") == 1);
  CHECK(prompt.find("Che cosa misura il PIL") != std::string::npos);
}

TEST_CASE("build_prompt is deterministic and rejects bad inputs") {
  std::string a = build_prompt("q", two_chunks(), kTemplate);
  std::string b = build_prompt("q", two_chunks(), kTemplate);
  CHECK(a == b);

  CHECK_THROWS_AS(build_prompt("q", {}, kTemplate), std::invalid_argument);
  CHECK_THROWS_AS(build_prompt("q", two_chunks(), "niente segnaposto"), ConfigError);
  CHECK_THROWS_AS(build_prompt("q", two_chunks(), "solo {query}"), ConfigError);
}

TEST_CASE("load_prompt_template validates the placeholders") {
  test_support::TempDir dir("tmpl");
  {
    std::ofstream out(dir.path() / "ok.txt");
    out << kTemplate;
  }
  CHECK(load_prompt_template(dir.path() / "ok.txt") == kTemplate);
  {
    std::ofstream out(dir.path() / "bad.txt");
    out << "manca tutto";
  }
  CHECK_THROWS_AS(load_prompt_template(dir.path() / "bad.txt"), ConfigError);
}

TEST_CASE("parse_citations deduplicates in first-mention order") {
  auto result = parse_citations("... [cit:c2] ... [cit:c1] ... [cit:c2]", {"c1", "c2"});
  CHECK(result.cited_chunk_ids == std::vector<std::string>{"c2", "c1"});
  CHECK_FALSE(result.abstained);
  CHECK(result.dropped_citations == 0);
}

TEST_CASE("parse_citations: the abstention sentinel wins") {
  auto result = parse_citations("NO_RELEVANT_INFORMATION", {"c1"});
  CHECK(result.abstained);
  CHECK(result.cited_chunk_ids.empty());
}

TEST_CASE("parse_citations drops out-of-context ids with a warning count") {
  auto result = parse_citations("[cit:ghost] e poi [cit:c1]", {"c1"});
  CHECK(result.cited_chunk_ids == std::vector<std::string>{"c1"});
  CHECK(result.dropped_citations == 1);
}

TEST_CASE("parse_citations is total on malformed input") {
  CHECK(parse_citations("[cit:", {"c1"}).cited_chunk_ids.empty());
  CHECK(parse_citations("[cit:]", {"c1"}).cited_chunk_ids.empty());
  CHECK(parse_citations("", {}).cited_chunk_ids.empty());
}

TEST_CASE("extractive stub cites chunks sharing a content token with the query") {
  GenerationRequest request;
  request.query = "Che cosa misura il PIL";
  request.context = {
      {"c1", "La retorica insegna a persuadere."},
      {"c2", "La pragmatica studia gli atti linguistici."},
      {"c3", "Il PIL misura la produzione di un paese."},
  };
  request.prompt = build_prompt(request.query, request.context, kTemplate);

  ExtractiveStubGenerator stub;
  GenerationResult result = generate(request, stub);
  CHECK(result.cited_chunk_ids == std::vector<std::string>{"c3"});
  CHECK_FALSE(result.abstained);
}

TEST_CASE("extractive stub abstains when no chunk overlaps the query") {
  GenerationRequest request;
  request.query = "astronomia delle galassie lontane";
  request.context = two_chunks();
  request.prompt = build_prompt(request.query, request.context, kTemplate);

  ExtractiveStubGenerator stub;
  GenerationResult result = generate(request, stub);
  CHECK(result.abstained);
  CHECK(result.cited_chunk_ids.empty());
  CHECK(result.answer_text == std::string(kAbstainSentinel));
}

TEST_CASE("make_generation_request renders the prompt from the template") {
  GenerationRequest request = make_generation_request("q di prova", two_chunks(), kTemplate);
  CHECK(request.query == "q di prova");
  CHECK(request.context.size() == 2);
  CHECK(request.prompt.find("[[chunk:c1]]") != std::string::npos);

  auto duplicated = two_chunks();
  duplicated.push_back(duplicated.front());
  CHECK_THROWS_AS(make_generation_request("q", duplicated, kTemplate), std::invalid_argument);
}

TEST_CASE("http generator returns content and writes the audit log") {
  httplib::Server server;
  server.Post("/v1/chat", [](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.at("model") == "test-model");
    nlohmann::json reply{
        {"choices", {{{"message", {{"content", "Risposta [cit:c1]"}}}}}},
    };
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  test_support::TempDir dir("gen_audit");
  HttpGeneratorOptions options;
  options.endpoint.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
  options.endpoint.max_retries = 0;
  options.model = "test-model";
  options.audit_log = dir.path() / "audit.jsonl";
  HttpGeneratorClient client(options);

  GenerationRequest request = make_generation_request("q", two_chunks(), kTemplate);
  GenerationResult result = generate(request, client);
  CHECK(result.cited_chunk_ids == std::vector<std::string>{"c1"});

  std::ifstream audit(dir.path() / "audit.jsonl");
  std::string line;
  REQUIRE(std::getline(audit, line));
  CHECK(nlohmann::json::parse(line).contains("request"));

  server.stop();
  thread.join();
}

TEST_CASE("http generator: persistent 500 becomes a hard transport error after retries") {
  std::atomic<int> hits{0};
  httplib::Server server;
  server.Post("/v1/chat", [&](const httplib::Request&, httplib::Response& res) {
    hits.fetch_add(1);
    res.status = 500;
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpGeneratorOptions options;
  options.endpoint.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
  options.endpoint.max_retries = 2;
  options.endpoint.retry_backoff_ms = 1;
  HttpGeneratorClient client(options);

  GenerationRequest request = make_generation_request("q", two_chunks(), kTemplate);
  CHECK_THROWS_AS(client.generate_answer(request), TransportError);
  CHECK(hits.load() == 3);

  server.stop();
  thread.join();
}

TEST_CASE("http generator: malformed response body is a hard error") {
  httplib::Server server;
  server.Post("/v1/chat", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("non è json", "text/plain");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpGeneratorOptions options;
  options.endpoint.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
  options.endpoint.max_retries = 0;
  HttpGeneratorClient client(options);
  GenerationRequest request = make_generation_request("q", two_chunks(), kTemplate);
  CHECK_THROWS_AS(client.generate_answer(request), TransportError);

  server.stop();
  thread.join();
}

TEST_CASE("http cross-scorer speaks the wire contract") {
  httplib::Server server;
  server.Post("/score", [](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.at("query") == "q");
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& passage : body.at("passages")) {
      scores.push_back({{"id", passage.at("id")},
                        {"score", double(passage.at("text").get<std::string>().size())}});
    }
    res.set_content(nlohmann::json{{"scores", scores}}.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpEndpointOptions options;
  options.url = "http://127.0.0.1:" + std::to_string(port) + "/score";
  options.max_retries = 0;
  HttpCrossScorer scorer(options);
  auto scored = scorer.score("q", {{"a", "breve"}, {"b", "testo molto più lungo"}});
  REQUIRE(scored.size() == 2);
  CHECK(scored[1].score > scored[0].score);

  server.stop();
  thread.join();
}
