#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "satrag/corpus.hpp"
#include "satrag/eval.hpp"
#include "satrag/providers.hpp"

namespace satrag {

enum class Association { SameDate, SameSubject, SameEntity, Random };
std::string_view to_string(Association a);
// Throws ConfigError.
Association parse_association(std::string_view s);

struct CandidatePair {
  std::vector<CellGroup> cells;
  Association association = Association::Random;
  std::uint64_t seed = 0;
};

struct QAPairDraft {
  std::string question;
  std::string answer;
  CandidatePair source;
};

// Reproducible shuffle: mt19937_64 with rejection-sampled bounded draws, so
// the order does not depend on the standard library's distributions.
void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed);

// Grouping key a cell falls under for an association, or none when the cell
// cannot take part (no period for same-date, no subject for same-subject...).
std::optional<std::string> association_key(const CellGroup& cg, Association a, SubjectExtractor& subjects);

// Shuffles all cells and streams them into per-key buckets, emitting a pair
// whenever a bucket holds `degree` cells. Never consults an embedder.
// Returns at most n_pairs pairs.
std::vector<CandidatePair> draw_pairs(const std::vector<CellGroup>& groups, Association association,
                                      std::size_t n_pairs, std::uint64_t seed, std::size_t degree = 2);
// As draw_pairs, but throws InsufficientCandidates when fewer than n_pairs exist.
std::vector<CandidatePair> pair_fields(const std::vector<CellGroup>& groups, Association association,
                                       std::size_t n_pairs, std::uint64_t seed, std::size_t degree = 2);

// Entity of a document via the entity-extraction prompt. Throws
// UnparseableEntity or ProviderFailure.
std::string enrich_entity(const Document& doc, CompletionProvider& llm);
// Fills empty entities in place (documents and their cell groups). Returns
// the number of documents updated; unparseable answers leave the entity empty.
std::size_t enrich_corpus_entities(Corpus& corpus, CompletionProvider& llm);

// "[n] <entity> | <caption> | <header path> = <value>" per cell.
std::string pair_context(const CandidatePair& pair);

struct ValidationOutcome {
  std::optional<QAPairDraft> draft;
  std::string reject_reason;  // set when rejected
};

// Throws UnparseableValidation or ProviderFailure.
ValidationOutcome validate_pair(const CandidatePair& pair, CompletionProvider& llm);

struct EmittedQa {
  std::vector<QaItem> f0;
  std::vector<QaItem> f1;
};

// Passages nearest to a table in document order: before/after alternately,
// closest first.
std::vector<std::string> nearest_passages(const Document& doc, const Table& table, std::size_t window);

// One f=0 and one f=1 record per distinct draft (by sorted cell ids and
// question). f=1 adds the passages around each source table.
EmittedQa emit_qa(const std::vector<QAPairDraft>& drafts, const Corpus& corpus, std::size_t window);

struct GenConfig {
  std::uint64_t seed = 7;
  std::vector<Association> associations{Association::SameDate, Association::SameEntity};
  std::size_t n_pairs = 20;  // per association
  std::size_t degree = 2;
  std::size_t passage_window = 2;
  bool paraphrase = false;
};

struct GenReport {
  std::size_t pairs_drawn = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t unparseable = 0;
  std::size_t duplicates = 0;
  std::size_t passages_paraphrased = 0;
  std::map<std::string, std::size_t> rejection_reasons;
  std::map<std::string, std::size_t> pairs_by_association;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

struct GenResult {
  EmittedQa qa;
  GenReport report;
};

// Enrich, pair, validate, emit. With paraphrasing on, f=1 passages that
// repeat a gold value verbatim are rewritten in the corpus.
GenResult generate_qa(Corpus& corpus, CompletionProvider& llm, const GenConfig& cfg);

// Rewrites passages that state any of the values verbatim. Returns how many changed.
std::size_t paraphrase_value_leaks(Corpus& corpus, const std::vector<QaItem>& f1, CompletionProvider& llm);

// qa_f0.jsonl, qa_f1.jsonl and gen_report.json.
void write_gen_outputs(const GenResult& result, const std::filesystem::path& dir);

}  // namespace satrag
