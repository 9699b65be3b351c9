#include "elrag/evaluation.hpp"

#include <algorithm>
#include <fstream>

#include "elrag/digest.hpp"
#include "elrag/errors.hpp"
#include "elrag/pipeline.hpp"
#include "elrag/text.hpp"
#include "json.hpp"

namespace elrag {

namespace {

using ordered_json = nlohmann::ordered_json;

std::size_t hits_in_prefix(const RetrievalRun& run, std::size_t k) {
  std::size_t hits = 0;
  const std::size_t limit = std::min(k, run.retrieved_ids.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (run.record.relevant_doc_ids.count(run.retrieved_ids[i]) > 0) ++hits;
  }
  return hits;
}

double reciprocal_rank_of_gold(const RetrievalRun& run) {
  for (std::size_t i = 0; i < run.retrieved_ids.size(); ++i) {
    if (run.retrieved_ids[i] == run.record.gold_answer_id) {
      return 1.0 / static_cast<double>(i + 1);
    }
  }
  return 0.0;  // absent gold contributes nothing
}

double reciprocal_rank_of_first_relevant(const RetrievalRun& run) {
  for (std::size_t i = 0; i < run.retrieved_ids.size(); ++i) {
    if (run.record.relevant_doc_ids.count(run.retrieved_ids[i]) > 0) {
      return 1.0 / static_cast<double>(i + 1);
    }
  }
  return 0.0;
}

std::pair<double, double> general_for_run(const RetrievalRun& run) {
  std::size_t hits = hits_in_prefix(run, run.retrieved_ids.size());
  double recall = run.record.relevant_doc_ids.empty()
                      ? 0.0
                      : static_cast<double>(hits) /
                            static_cast<double>(run.record.relevant_doc_ids.size());
  double precision = run.retrieved_ids.empty()
                         ? 0.0
                         : static_cast<double>(hits) /
                               static_cast<double>(run.retrieved_ids.size());
  return {recall, precision};
}

ordered_json row_to_json(const PerQueryRow& row) {
  ordered_json j{
      {"query", row.query},
      {"question_type", row.question_type},
      {"exact_match", row.exact_match},
      {"reciprocal_rank_gold", row.reciprocal_rank_gold},
      {"reciprocal_rank_rel", row.reciprocal_rank_rel},
      {"n_relevant", row.n_relevant},
      {"n_retrieved", row.n_retrieved},
  };
  if (!row.recall_at.empty()) {
    ordered_json recall = ordered_json::object();
    ordered_json precision = ordered_json::object();
    for (const auto& [k, v] : row.recall_at) recall[std::to_string(k)] = v;
    for (const auto& [k, v] : row.precision_at) precision[std::to_string(k)] = v;
    j["recall_at"] = std::move(recall);
    j["precision_at"] = std::move(precision);
  }
  if (row.recall_general) j["recall"] = *row.recall_general;
  if (row.precision_general) j["precision"] = *row.precision_general;
  if (!row.recall_capped_ks.empty()) j["recall_capped_at_k"] = row.recall_capped_ks;
  return j;
}

PerQueryRow make_row(const RetrievalRun& run, bool with_at_k) {
  PerQueryRow row;
  row.query = run.record.query;
  row.question_type = to_string(run.record.question_type);
  row.exact_match = !run.retrieved_ids.empty() &&
                    run.retrieved_ids.front() == run.record.gold_answer_id;
  row.reciprocal_rank_gold = reciprocal_rank_of_gold(run);
  row.reciprocal_rank_rel = reciprocal_rank_of_first_relevant(run);
  row.n_relevant = static_cast<int>(run.record.relevant_doc_ids.size());
  row.n_retrieved = static_cast<int>(run.retrieved_ids.size());
  if (with_at_k) {
    for (int k : kReportKs) {
      std::vector<RetrievalRun> single{run};
      row.recall_at[k] = recall_at_k(single, k);
      row.precision_at[k] = precision_at_k(single, k);
      if (row.n_relevant > k) row.recall_capped_ks.push_back(k);
    }
  } else {
    auto [recall, precision] = general_for_run(run);
    row.recall_general = recall;
    row.precision_general = precision;
  }
  return row;
}

void ensure_duplicate_free(const RetrievalRun& run) {
  std::set<std::string> seen;
  for (const auto& id : run.retrieved_ids) {
    if (!seen.insert(id).second) {
      throw DataError("retrieved ids contain a duplicate: " + id);
    }
  }
}

}  // namespace

std::string to_string(QuestionType type) {
  switch (type) {
    case QuestionType::factual: return "factual";
    case QuestionType::synthesis: return "synthesis";
    case QuestionType::inference: return "inference";
    case QuestionType::unknown: return "unknown";
  }
  return "unknown";
}

QuestionType question_type_from_string(const std::string& value) {
  if (value == "factual") return QuestionType::factual;
  if (value == "synthesis") return QuestionType::synthesis;
  if (value == "inference") return QuestionType::inference;
  if (value == "unknown" || value.empty()) return QuestionType::unknown;
  throw DataError("unknown question_type \"" + value + "\"");
}

double exact_match(const std::vector<RetrievalRun>& runs) {
  if (runs.empty()) return 0.0;
  std::size_t matches = 0;
  for (const auto& run : runs) {
    if (!run.retrieved_ids.empty() && run.retrieved_ids.front() == run.record.gold_answer_id) {
      ++matches;
    }
  }
  return static_cast<double>(matches) / static_cast<double>(runs.size());
}

double recall_at_k(const std::vector<RetrievalRun>& runs, int k) {
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& run : runs) {
    if (run.record.relevant_doc_ids.empty()) continue;
    sum += static_cast<double>(hits_in_prefix(run, static_cast<std::size_t>(k))) /
           static_cast<double>(run.record.relevant_doc_ids.size());
  }
  return sum / static_cast<double>(runs.size());
}

double precision_at_k(const std::vector<RetrievalRun>& runs, int k) {
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& run : runs) {
    sum += static_cast<double>(hits_in_prefix(run, static_cast<std::size_t>(k))) /
           static_cast<double>(k);
  }
  return sum / static_cast<double>(runs.size());
}

double mrr_gold(const std::vector<RetrievalRun>& runs) {
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& run : runs) sum += reciprocal_rank_of_gold(run);
  return sum / static_cast<double>(runs.size());
}

double mrr_rel_docs(const std::vector<RetrievalRun>& runs) {
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& run : runs) sum += reciprocal_rank_of_first_relevant(run);
  return sum / static_cast<double>(runs.size());
}

std::pair<double, double> general_recall_precision(const std::vector<RetrievalRun>& runs) {
  if (runs.empty()) return {0.0, 0.0};
  double recall_sum = 0.0;
  double precision_sum = 0.0;
  for (const auto& run : runs) {
    auto [recall, precision] = general_for_run(run);
    recall_sum += recall;
    precision_sum += precision;
  }
  return {recall_sum / static_cast<double>(runs.size()),
          precision_sum / static_cast<double>(runs.size())};
}

// --- loaders ----------------------------------------------------------------

std::vector<BenchmarkRecord> load_custom_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open benchmark file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed benchmark JSON in " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw DataError("benchmark file must be a JSON array of records");

  std::vector<BenchmarkRecord> records;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path_prefix = "$[" + std::to_string(i) + "]";
    const auto& item = doc[i];
    if (!item.is_object()) throw DataError("benchmark schema error: " + path_prefix);
    BenchmarkRecord record;
    for (const char* key : {"query", "gold_answer_id", "relevant_doc_ids"}) {
      if (!item.contains(key)) {
        throw DataError("benchmark schema error: missing " + path_prefix + "." + key);
      }
    }
    record.query = item["query"].get<std::string>();
    record.question_type = question_type_from_string(item.value("question_type", "unknown"));
    record.gold_answer_id = item["gold_answer_id"].get<std::string>();
    for (const auto& id : item["relevant_doc_ids"]) {
      record.relevant_doc_ids.insert(id.get<std::string>());
    }
    if (record.relevant_doc_ids.empty()) {
      throw DataError("benchmark schema error: empty relevant_doc_ids at " + path_prefix);
    }
    if (record.relevant_doc_ids.count(record.gold_answer_id) == 0) {
      throw DataError("benchmark record at " + path_prefix +
                      ": gold_answer_id is not in relevant_doc_ids");
    }
    if (auto it = item.find("metadata"); it != item.end() && it->is_object()) {
      for (const auto& [k, v] : it->items()) {
        record.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::pair<Corpus, std::vector<BenchmarkRecord>> load_squad_style(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open benchmark file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed benchmark JSON in " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array()) {
    throw DataError("benchmark schema error: expected top-level {\"data\": [...]}");
  }

  Corpus corpus;
  corpus.metadata["source"] = path.filename().string();
  std::map<std::string, std::size_t> context_index;  // chunk_id -> position
  std::vector<BenchmarkRecord> records;

  for (std::size_t d = 0; d < doc["data"].size(); ++d) {
    const auto& article = doc["data"][d];
    if (!article.contains("paragraphs") || !article["paragraphs"].is_array()) {
      throw DataError("benchmark schema error: missing $.data[" + std::to_string(d) +
                      "].paragraphs");
    }
    for (std::size_t p = 0; p < article["paragraphs"].size(); ++p) {
      const auto& paragraph = article["paragraphs"][p];
      const std::string where =
          "$.data[" + std::to_string(d) + "].paragraphs[" + std::to_string(p) + "]";
      if (!paragraph.contains("context") || !paragraph["context"].is_string()) {
        throw DataError("benchmark schema error: missing " + where + ".context");
      }
      const std::string context = paragraph["context"].get<std::string>();
      // The passage is the retrieval unit: one chunk per unique context,
      // id derived from the content so it is stable across runs.
      const std::string chunk_id = sha256_hex16(context);
      if (context_index.find(chunk_id) == context_index.end()) {
        Chunk chunk;
        chunk.chunk_id = chunk_id;
        chunk.doc_id = "squad";
        chunk.text = context;
        chunk.token_count = count_tokens(context);
        // passages come as-is; flag the ones outside the default bounds
        chunk.flags.short_chunk = chunk.token_count < 20;
        chunk.flags.oversized = chunk.token_count > 300;
        context_index[chunk_id] = corpus.chunks.size();
        corpus.chunks.push_back(std::move(chunk));
      }
      if (!paragraph.contains("qas") || !paragraph["qas"].is_array()) {
        throw DataError("benchmark schema error: missing " + where + ".qas");
      }
      for (const auto& qa : paragraph["qas"]) {
        if (!qa.contains("question")) {
          throw DataError("benchmark schema error: missing question in " + where + ".qas");
        }
        BenchmarkRecord record;
        record.query = qa["question"].get<std::string>();
        record.question_type = QuestionType::unknown;
        record.gold_answer_id = chunk_id;
        record.relevant_doc_ids = {chunk_id};
        if (qa.contains("id")) {
          record.metadata["qa_id"] =
              qa["id"].is_string() ? qa["id"].get<std::string>() : qa["id"].dump();
        }
        records.push_back(std::move(record));
      }
    }
  }
  return {std::move(corpus), std::move(records)};
}

// --- reports ----------------------------------------------------------------

std::string EvalReport::to_json_string() const {
  ordered_json j{
      {"method", method},
      {"strategy", strategy},
      {"config_fingerprint", config_fingerprint},
      {"n_queries", n_queries},
      {"em", em},
  };
  if (!recall_at.empty()) {
    ordered_json recall = ordered_json::object();
    ordered_json precision = ordered_json::object();
    for (const auto& [k, v] : recall_at) recall[std::to_string(k)] = v;
    for (const auto& [k, v] : precision_at) precision[std::to_string(k)] = v;
    j["recall_at"] = std::move(recall);
    j["precision_at"] = std::move(precision);
  }
  j["mrr_gold"] = mrr_gold;
  j["mrr_rel_docs"] = mrr_rel_docs;
  if (recall_general) j["recall"] = *recall_general;
  if (precision_general) j["precision"] = *precision_general;
  ordered_json rows = ordered_json::array();
  for (const auto& row : per_query) rows.push_back(row_to_json(row));
  j["per_query"] = std::move(rows);
  return j.dump(2) + "\n";
}

void EvalReport::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report: " + path.string());
  out << to_json_string();
}

// --- method runners ----------------------------------------------------------

EvalReport run_method1(const Pipeline& pipeline,
                       const std::vector<BenchmarkRecord>& benchmark) {
  std::vector<RetrievalRun> runs;
  runs.reserve(benchmark.size());
  for (const auto& record : benchmark) {
    RetrievalRun run;
    run.record = record;
    try {
      for (const auto& candidate : pipeline.run_query(record.query)) {
        run.retrieved_ids.push_back(candidate.chunk_id);
      }
    } catch (const std::exception& e) {
      throw DataError("evaluation aborted at query \"" + record.query + "\": " + e.what());
    }
    ensure_duplicate_free(run);
    runs.push_back(std::move(run));
  }

  EvalReport report;
  report.method = "method1";
  report.strategy = pipeline.strategy_name();
  report.config_fingerprint = pipeline.config_fingerprint;
  report.n_queries = static_cast<int>(runs.size());
  report.em = exact_match(runs);
  for (int k : kReportKs) {
    report.recall_at[k] = recall_at_k(runs, k);
    report.precision_at[k] = precision_at_k(runs, k);
  }
  report.mrr_gold = mrr_gold(runs);
  report.mrr_rel_docs = mrr_rel_docs(runs);
  for (const auto& run : runs) report.per_query.push_back(make_row(run, /*with_at_k=*/true));
  return report;
}

EvalReport run_method3(const Pipeline& pipeline, const std::vector<BenchmarkRecord>& benchmark,
                       GeneratorClient& generator) {
  std::vector<RetrievalRun> runs;
  runs.reserve(benchmark.size());
  for (const auto& record : benchmark) {
    RetrievalRun run;
    run.record = record;
    try {
      std::vector<ScoredCandidate> ranking = pipeline.run_query(record.query);
      std::vector<ContextChunk> context = pipeline.context_for(ranking, ranking.size());
      if (!context.empty()) {
        GenerationRequest request =
            make_generation_request(record.query, std::move(context), pipeline.prompt_template);
        GenerationResult result = generate(request, generator);
        run.retrieved_ids = result.cited_chunk_ids;
      }
    } catch (const std::exception& e) {
      throw DataError("evaluation aborted at query \"" + record.query + "\": " + e.what());
    }
    ensure_duplicate_free(run);
    runs.push_back(std::move(run));
  }

  EvalReport report;
  report.method = "method3";
  report.strategy = pipeline.strategy_name();
  report.config_fingerprint = pipeline.config_fingerprint;
  report.n_queries = static_cast<int>(runs.size());
  report.em = exact_match(runs);
  report.mrr_gold = mrr_gold(runs);
  report.mrr_rel_docs = mrr_rel_docs(runs);
  auto [recall, precision] = general_recall_precision(runs);
  report.recall_general = recall;
  report.precision_general = precision;
  for (const auto& run : runs) report.per_query.push_back(make_row(run, /*with_at_k=*/false));
  return report;
}

// --- Method 2 ----------------------------------------------------------------

std::string ConstantJudge::judge(const std::string&) {
  ordered_json j{
      {"completeness", completeness_},
      {"relevance", relevance_},
      {"clarity", clarity_},
  };
  return j.dump();
}

std::string build_judge_prompt(const std::string& query, const std::string& answer) {
  std::string prompt =
      "Sei un valutatore esterno. Valuta la risposta alla domanda su tre criteri,\n"
      "ognuno con un voto intero da 1 a 10: completeness, relevance, clarity.\n"
      "Rispondi SOLO con un oggetto JSON nella forma\n"
      "{\"completeness\": n, \"relevance\": n, \"clarity\": n}.\n\n";
  prompt += "Domanda: " + query + "\n\nRisposta da valutare:\n" + answer + "\n";
  return prompt;
}

std::optional<JudgeScore> parse_judge_response(const std::string& response) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(response);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (!j.is_object()) return std::nullopt;
  JudgeScore score;
  try {
    score.completeness = j.at("completeness").get<int>();
    score.relevance = j.at("relevance").get<int>();
    score.clarity = j.at("clarity").get<int>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  for (int v : {score.completeness, score.relevance, score.clarity}) {
    if (v < 1 || v > 10) return std::nullopt;
  }
  return score;
}

std::string Method2Report::to_json_string() const {
  ordered_json rows = ordered_json::array();
  for (const auto& score : per_query) {
    if (score) {
      rows.push_back(ordered_json{{"completeness", score->completeness},
                                  {"relevance", score->relevance},
                                  {"clarity", score->clarity}});
    } else {
      rows.push_back(nullptr);
    }
  }
  ordered_json j{
      {"method", "method2"},
      {"config_fingerprint", config_fingerprint},
      {"avg_completeness", avg_completeness},
      {"avg_relevance", avg_relevance},
      {"avg_clarity", avg_clarity},
      {"excluded", excluded},
      {"per_query", std::move(rows)},
  };
  return j.dump(2) + "\n";
}

Method2Report run_method2(const Pipeline& pipeline,
                          const std::vector<BenchmarkRecord>& benchmark,
                          GeneratorClient& generator, JudgeClient& judge) {
  // Context capped at the top-3 chunks so answers stay comparable across
  // configurations.
  constexpr std::size_t kContextChunks = 3;

  Method2Report report;
  report.config_fingerprint = pipeline.config_fingerprint;
  double sums[3] = {0.0, 0.0, 0.0};
  int valid = 0;
  for (const auto& record : benchmark) {
    std::vector<ScoredCandidate> ranking = pipeline.run_query(record.query);
    std::vector<ContextChunk> context = pipeline.context_for(ranking, kContextChunks);
    std::string answer;
    if (context.empty()) {
      answer = std::string(kAbstainSentinel);
    } else {
      GenerationRequest request =
          make_generation_request(record.query, std::move(context), pipeline.prompt_template);
      answer = generate(request, generator).answer_text;
    }
    std::optional<JudgeScore> score =
        parse_judge_response(judge.judge(build_judge_prompt(record.query, answer)));
    if (score) {
      sums[0] += score->completeness;
      sums[1] += score->relevance;
      sums[2] += score->clarity;
      ++valid;
    } else {
      ++report.excluded;
    }
    report.per_query.push_back(score);
  }
  if (valid > 0) {
    report.avg_completeness = sums[0] / valid;
    report.avg_relevance = sums[1] / valid;
    report.avg_clarity = sums[2] / valid;
  }
  return report;
}

}  // namespace elrag
