#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "satrag/corpus.hpp"
#include "satrag/fusion.hpp"
#include "satrag/retrieval.hpp"

namespace satrag {

// Exact ratio; equality is by cross-multiplication.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction& o) const { return num * o.den == o.num * den; }
};

// 1 when any gold id is in the top k. Throws EmptyGold.
Fraction hit_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& gold, std::size_t k);
// Distinct gold ids in the top k over |gold|. Throws EmptyGold.
Fraction recall_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& gold,
                     std::size_t k);
// Top-k positions holding a gold id, over k (not over the number returned).
Fraction precision_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& gold,
                        std::size_t k);

struct CellMetrics {
  Fraction hit;
  Fraction recall;
  Fraction precision;
};

// Each retrieved unit carries the cells it covers: one for an evidence tuple,
// a whole row for a row chunk, none for a passage. Over the top-k units, the
// distinct attributed cells are scored; precision divides by
// max(k, attributed cells). Throws EmptyGold.
CellMetrics cell_metrics(const std::vector<std::vector<std::string>>& retrieved_units,
                         const std::set<std::string>& gold_cells, std::size_t k);

// Numbers match after normalization (currency, separators, '%', parenthesized
// negatives); other values match as case-insensitive substrings. Throws
// EmptyGold.
Fraction exact_value_recall(std::string_view answer, const std::vector<std::string>& gold_values);

// Sentence and line based claims with citation markers and the echo prefix removed.
std::vector<std::string> split_claims(std::string_view text);

struct ClaimScores {
  Fraction precision;
  Fraction recall;
};
ClaimScores claim_alignment(std::string_view answer, std::string_view reference, Embedder& embedder,
                            double theta = 0.6);

struct QaItem {
  std::string query_id;
  std::string question;
  int flag = 0;
  std::vector<std::string> gold_cell_ids;
  std::vector<std::string> gold_passage_ids;  // doc_id/passage_id
  std::string gold_answer;
  std::vector<std::string> gold_values;

  bool operator==(const QaItem&) const = default;
};

nlohmann::json qa_item_to_json(const QaItem& item);
QaItem qa_item_from_json(const nlohmann::json& j);
std::string qa_items_to_jsonl(const std::vector<QaItem>& items);
std::vector<QaItem> qa_items_from_jsonl(std::string_view jsonl);
std::vector<QaItem> load_qa_file(const std::filesystem::path& path);

struct MetricRow {
  std::size_t k = 0;  // 0 marks the natural-size row
  double hit_rate = 0;
  double recall = 0;
  double precision = 0;
  double cell_hit_rate = 0;
  double cell_recall = 0;
  double cell_precision = 0;

  bool operator==(const MetricRow&) const = default;
};

struct MetricReport {
  std::string label;
  int flag = 0;
  std::size_t n_queries = 0;
  std::size_t n_failures = 0;
  std::vector<MetricRow> per_k;
  MetricRow natural;
  double value_accuracy_recall = 0;
  double claim_precision = 0;
  double claim_recall = 0;
  std::size_t answers_scored = 0;

  bool operator==(const MetricReport&) const = default;
  nlohmann::json to_json() const;
  // HR/R/P and C-HR/C-R/C-P rows against one column per cutoff plus "natural".
  std::string to_table() const;
};

struct EvalConfig {
  std::string label = "full";
  RetrievalConfig retrieval;
  FusionConfig fusion;
  std::vector<std::size_t> cutoffs_f0{1, 3, 5, 10};
  std::vector<std::size_t> cutoffs_f1{4, 12, 20, 40};
  double claim_threshold = 0.6;
};

// Throws ConfigError unless strictly increasing and positive.
void check_cutoffs(const std::vector<std::size_t>& cutoffs);

struct EvalContext {
  const SATGraph& graph;
  const Corpus& corpus;
  const std::vector<Chunk>& chunks;
  Embedder& embedder;
  QueryAnalyzer& analyzer;
  CompletionProvider* llm = nullptr;  // no generation when null
};

// Per-query record of what was retrieved and how it scored.
struct QueryOutcome {
  std::string query_id;
  int flag = 0;
  std::vector<std::string> units;                   // chunk-level ids, ranked
  std::vector<std::vector<std::string>> cell_units;  // cells per retrieved unit
  std::size_t natural_units = 0;
  std::size_t natural_cell_units = 0;
  std::string answer;
  std::optional<Fraction> value_recall;
  std::optional<ClaimScores> claims;
  std::string failure;

  nlohmann::json to_json() const;
};

struct EvalOutput {
  std::vector<MetricReport> reports;  // one per flag present, ascending
  std::vector<QueryOutcome> outcomes;
};

// Gold chunk-level ids: tables of the gold cells plus gold passages.
std::set<std::string> gold_units(const QaItem& item);

QueryOutcome evaluate_query(const EvalContext& ctx, const QaItem& item, const EvalConfig& cfg);
MetricReport aggregate(const std::vector<QaItem>& items, const std::vector<QueryOutcome>& outcomes,
                       int flag, const std::vector<std::size_t>& cutoffs, const std::string& label);
EvalOutput run_eval(const EvalContext& ctx, const std::vector<QaItem>& items, const EvalConfig& cfg);

// The four ablation settings derived from a base config, in order: full,
// w/o SAT (chunk baseline), w/o SNE, w/o fusion.
std::vector<EvalConfig> ablation_configs(const EvalConfig& base);
// File-name form of a label: "w/o SNE" -> "wo-sne".
std::string label_slug(std::string_view label);

}  // namespace satrag
