#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "elrag/corpus.hpp"
#include "elrag/generation.hpp"

namespace elrag {

struct Pipeline;  // pipeline.hpp

enum class QuestionType { factual, synthesis, inference, unknown };

std::string to_string(QuestionType type);
QuestionType question_type_from_string(const std::string& value);

struct BenchmarkRecord {
  std::string query;
  QuestionType question_type = QuestionType::unknown;
  std::string gold_answer_id;
  std::set<std::string> relevant_doc_ids;  // non-empty, contains gold_answer_id
  std::map<std::string, std::string> metadata;
};

/// One evaluated query: the record plus the ranked ids the system returned
/// (the final ranking for Method 1, the cited ids for Method 3).
struct RetrievalRun {
  BenchmarkRecord record;
  std::vector<std::string> retrieved_ids;  // duplicate-free
};

/// Per-record metric row carried inside a report; ks where recall is capped
/// below 1 (|relevant| > k) are surfaced explicitly.
struct PerQueryRow {
  std::string query;
  std::string question_type;
  bool exact_match = false;
  double reciprocal_rank_gold = 0.0;
  double reciprocal_rank_rel = 0.0;
  std::map<int, double> recall_at;     // Method 1 only
  std::map<int, double> precision_at;  // Method 1 only
  std::optional<double> recall_general;
  std::optional<double> precision_general;
  int n_relevant = 0;
  int n_retrieved = 0;
  std::vector<int> recall_capped_ks;
};

struct EvalReport {
  std::string method;  // "method1" | "method3"
  std::string strategy;
  std::string config_fingerprint;
  int n_queries = 0;
  double em = 0.0;
  std::map<int, double> recall_at;
  std::map<int, double> precision_at;
  double mrr_gold = 0.0;
  double mrr_rel_docs = 0.0;
  std::optional<double> recall_general;
  std::optional<double> precision_general;
  std::vector<PerQueryRow> per_query;

  /// Deterministic JSON rendering; equal reports give equal bytes.
  std::string to_json_string() const;
  void save(const std::filesystem::path& path) const;
};

/// ks reported by Method 1.
inline constexpr int kReportKs[] = {1, 3, 5, 10};

// --- metric primitives (means over runs; empty input yields 0) -------------

/// Fraction of runs whose first retrieved id equals the gold answer; an
/// empty retrieval counts as a miss.
double exact_match(const std::vector<RetrievalRun>& runs);

/// Mean of |retrieved[:k] ∩ relevant| / |relevant|. The denominator follows
/// the formula even when |relevant| > k, capping attainable recall.
double recall_at_k(const std::vector<RetrievalRun>& runs, int k);

/// Mean of |retrieved[:k] ∩ relevant| / k; the denominator stays k even
/// when fewer ids were retrieved.
double precision_at_k(const std::vector<RetrievalRun>& runs, int k);

/// Mean reciprocal 1-based rank of the gold answer; 0 when absent.
double mrr_gold(const std::vector<RetrievalRun>& runs);

/// Mean reciprocal 1-based rank of the first relevant document; 0 when none
/// appears.
double mrr_rel_docs(const std::vector<RetrievalRun>& runs);

/// Variable-length metrics for citation-filtered retrieval: per-run recall
/// = |retrieved ∩ relevant| / |relevant|, precision = |retrieved ∩
/// relevant| / |retrieved| (0 for an empty retrieval); returns the means.
std::pair<double, double> general_recall_precision(const std::vector<RetrievalRun>& runs);

// --- benchmark loaders ------------------------------------------------------

/// Array of {"query", "question_type", "gold_answer_id", "relevant_doc_ids",
/// "metadata"}. Schema violations raise DataError with a JSON-path
/// diagnostic; a record whose gold is outside its relevant set is rejected.
std::vector<BenchmarkRecord> load_custom_benchmark(const std::filesystem::path& path);

/// Conventional nested data/paragraphs/{context, qas:[{question, id}]}
/// shape. Each unique context becomes one chunk whose id is a stable
/// content hash; every question becomes a record whose relevant set is the
/// singleton holding its context's id. Identical contexts deduplicate.
/// Answer spans are ignored.
std::pair<Corpus, std::vector<BenchmarkRecord>> load_squad_style(
    const std::filesystem::path& path);

// --- method runners ---------------------------------------------------------

/// Classical evaluation of the final re-ranked list (no generation step).
EvalReport run_method1(const Pipeline& pipeline,
                       const std::vector<BenchmarkRecord>& benchmark);

/// Full-pipeline evaluation: the generator's cited chunks form the
/// retrieved set, so @k metrics are omitted and the general recall/
/// precision pair is reported instead.
EvalReport run_method3(const Pipeline& pipeline, const std::vector<BenchmarkRecord>& benchmark,
                       GeneratorClient& generator);

// --- LLM-judge plumbing (Method 2) ------------------------------------------

struct JudgeScore {
  int completeness = 0;  // each 1..10
  int relevance = 0;
  int clarity = 0;
};

/// Judge contract: given the rendered judge prompt, return the raw model
/// output. The judging model itself is external.
class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual std::string judge(const std::string& prompt) = 0;
};

/// Test stub returning a fixed score triple as JSON.
class ConstantJudge final : public JudgeClient {
 public:
  ConstantJudge(int completeness, int relevance, int clarity)
      : completeness_(completeness), relevance_(relevance), clarity_(clarity) {}
  std::string judge(const std::string& prompt) override;

 private:
  int completeness_, relevance_, clarity_;
};

/// The prompt sent to the judge: asks for the three 1-10 integers in a
/// fixed JSON shape.
std::string build_judge_prompt(const std::string& query, const std::string& answer);

/// Parses {"completeness": n, "relevance": n, "clarity": n}; out-of-range
/// or unparseable output yields nullopt.
std::optional<JudgeScore> parse_judge_response(const std::string& response);

struct Method2Report {
  std::string config_fingerprint;
  std::vector<std::optional<JudgeScore>> per_query;  // nullopt = excluded
  double avg_completeness = 0.0;  // over valid responses only
  double avg_relevance = 0.0;
  double avg_clarity = 0.0;
  int excluded = 0;

  std::string to_json_string() const;
};

/// Generates answers from the top-3 chunks of each query's final ranking,
/// scores them with the judge, and averages the valid responses.
Method2Report run_method2(const Pipeline& pipeline,
                          const std::vector<BenchmarkRecord>& benchmark,
                          GeneratorClient& generator, JudgeClient& judge);

}  // namespace elrag
