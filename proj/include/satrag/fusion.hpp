#pragma once

#include <set>
#include <string>
#include <vector>

#include "satrag/corpus.hpp"
#include "satrag/providers.hpp"
#include "satrag/retrieval.hpp"
#include "satrag/sat_graph.hpp"

namespace satrag {

struct LinearizedFact {
  std::string statement;
  EvidenceTuple source;
};

// "<subject>'s <attribute> is <value> at <period>", with the deepest subject
// label and the period's raw label.
LinearizedFact linearize(const SATGraph& g, const EvidenceTuple& t);

struct ScoredPassage {
  std::string key;  // doc_id/passage_id, or a chunk id for baseline chunks
  std::string doc_id;
  std::string text;
  double score = 0.0;
};

// Top-k passages of the fact's source document only.
std::vector<ScoredPassage> fetch_context(const LinearizedFact& fact, const Corpus& corpus,
                                         Embedder& embedder, std::size_t k);

struct EvidencePackage {
  std::vector<LinearizedFact> facts;
  std::vector<ScoredPassage> passages;
  Query query;
};

struct FusionConfig {
  std::size_t passages_per_fact = 2;
  std::size_t prompt_budget = 8000;  // characters
};

// Facts for every tuple; passages only when the query needs text and fusion
// is enabled. Passages are deduplicated in first-seen order.
EvidencePackage build_package(const SATGraph& g, const Corpus& corpus, const std::vector<EvidenceTuple>& tuples,
                              const Query& q, const RetrievalConfig& rcfg, const FusionConfig& fcfg,
                              Embedder& embedder);

// Chunk-baseline package: retrieved chunks stand in as passages, no facts.
EvidencePackage build_chunk_package(const std::vector<Chunk>& chunks,
                                    const std::vector<ScoredChunk>& retrieved, const Query& q);

inline constexpr std::string_view kTruncationMarker = " [...truncated]";

// Instruction, Facts, Passages (when any), Question, citation instruction.
// Over budget, passages are cut from the last one backwards; facts never are.
// Throws EmptyEvidence.
std::string assemble_prompt(const EvidencePackage& pkg, std::size_t budget = 8000);

struct Answer {
  std::string text;
  std::set<std::string> cited_cell_ids;
  std::set<std::string> cited_passage_ids;
  std::vector<std::string> diagnostics;
};

// Citation markers [F#]/[P#] map back to the package; out-of-range ones are
// dropped with a diagnostic. Throws ProviderFailure or EmptyCompletion.
Answer generate_answer(const std::string& prompt, const EvidencePackage& pkg, CompletionProvider& llm);

}  // namespace satrag
