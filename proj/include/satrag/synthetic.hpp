#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "satrag/eval.hpp"
#include "satrag/ingest.hpp"
#include "satrag/retrieval.hpp"
#include "satrag/sat_graph.hpp"

namespace satrag {

// Ground truth for one generated data cell.
struct ToyCell {
  std::string cell_id;
  std::string doc_id;
  std::string entity;
  std::string table_id;
  std::string attribute;    // label as the graph will show it, e.g. "Retail / Sales"
  std::string query_words;  // how a question names it, e.g. "retail sales"
  std::string period;       // "2019" or "Q2 2019"
  int year = 0;
  int quarter = 0;  // 0 for annual cells
  std::string value;
};

// Figures stated only in a passage, never in a table.
struct ToyPassageFact {
  std::string doc_id;
  std::string passage_id;
  std::string entity;
  int year = 0;
  std::string employees;
  std::string sites;
};

struct ToyCorpus {
  std::vector<Document> documents;
  std::vector<ToyCell> cells;
  std::vector<ToyPassageFact> passage_facts;
};

inline constexpr int kToyFirstYear = 2016;
inline constexpr int kToyLastYear = 2020;

// Five company reports with three tables each: a flat income statement, a
// segment table with two-tier row headers and a quarterly table with years
// spanning quarter columns. Table values are distinct across the corpus.
// Rows carry no company name; only titles and passages do.
ToyCorpus make_toy_corpus(std::uint64_t seed = 42);

// One structured-grid JSON file per document.
void write_toy_inputs(const ToyCorpus& corpus, const std::filesystem::path& dir);

const ToyCell* find_toy_cell(const ToyCorpus& corpus, std::string_view doc_id, std::string_view attribute,
                             int year, int quarter = 0);

// Mixed benchmark: point lookups (f=0), year-over-year comparisons whose
// prior-year value only neighbor expansion reaches (f=0), and lookups that
// also ask for passage-only figures (f=1).
std::vector<QaItem> make_ablation_benchmark(const ToyCorpus& corpus, std::uint64_t seed = 7,
                                            std::size_t n_point = 20, std::size_t n_comparison = 15,
                                            std::size_t n_text = 15);

struct SneFixture {
  Query query;
  std::string focal_cell;
  std::vector<std::string> neighbor_cells;  // same subject and attribute, adjacent period
};

// Comparison questions for every cell whose previous and next sibling periods exist.
std::vector<SneFixture> make_sne_fixtures(const ToyCorpus& corpus);

// Varied questions over graph labels: full, partial and unresolvable slots,
// every intent, some with no usable slot at all.
std::vector<Query> make_random_queries(const SATGraph& g, std::size_t n, std::uint64_t seed);

}  // namespace satrag
