#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "satrag/corpus.hpp"
#include "satrag/providers.hpp"
#include "satrag/sat_graph.hpp"

namespace satrag {

struct Query {
  std::string text;
  int flag = 0;  // 1 when surrounding text is needed as well as tables
};

enum class Intent { PointLookup, TemporalComparison, SubjectBreakdown };
std::string_view to_string(Intent intent);

struct QuerySlots {
  std::optional<std::string> subject_hint;
  std::optional<std::string> temporal_hint;
  std::optional<std::string> attribute_hint;
  Intent intent = Intent::PointLookup;

  bool empty() const { return !subject_hint && !temporal_hint && !attribute_hint; }
  bool operator==(const QuerySlots&) const = default;
};

class QueryAnalyzer {
 public:
  virtual ~QueryAnalyzer() = default;
  // Throws NoSlots when nothing can be extracted.
  virtual QuerySlots analyze(const Query& q) = 0;
};

// Keyword intent rules shared by every analyzer.
Intent detect_intent(std::string_view text);

// Deterministic analyzer. Subject and attribute hints come from a lexicon of
// graph labels (longest case-insensitive whole-word match); the temporal hint
// is the first temporal expression; when no attribute label matches, the
// remaining content words form the attribute hint.
class LexiconAnalyzer final : public QueryAnalyzer {
 public:
  LexiconAnalyzer() = default;
  explicit LexiconAnalyzer(const SATGraph& g);
  QuerySlots analyze(const Query& q) override;

 private:
  std::vector<std::string> subjects_;    // lower-cased
  std::vector<std::string> attributes_;  // lower-cased
  std::map<std::string, std::string> display_;
};

struct EvidenceTuple {
  CompositeKey key;
  LeafId leaf;
  std::string value;
  std::string source_table;
  std::string doc_id;
  std::string cell_id;
  double score = 0.0;
  unsigned hop = 0;  // 0 for focal tuples, distance for expanded ones

  bool operator==(const EvidenceTuple&) const = default;
};

enum class RetrievalMode { SatGraph, ChunkBaseline };
std::string_view to_string(RetrievalMode mode);

struct RetrievalConfig {
  std::size_t top_k = 10;
  double similarity_threshold = 0.35;
  std::size_t expansion_radius = 1;
  bool enable_sne = true;
  bool enable_fusion = true;
  RetrievalMode mode = RetrievalMode::SatGraph;
};

inline constexpr double kExpansionDecay = 0.9;

// Cosines are rounded to this grid so that ties are exact.
double quantize_score(double s);

// Nodes tied at the highest cosine to the hint, provided it reaches tau.
// Sentinel nodes never resolve. Temporal hints are compared in canonical form.
// Throw AnchorNotResolved.
std::vector<SubjectId> resolve_subject(const SATGraph& g, std::string_view hint, Embedder& embedder,
                                       double tau);
std::vector<TemporalId> resolve_temporal(const SATGraph& g, std::string_view hint, Embedder& embedder,
                                         double tau);
std::vector<AttributeId> resolve_attribute(const SATGraph& g, std::string_view hint,
                                           Embedder& embedder, double tau);

struct ForwardResult {
  std::set<AttributeId> attributes;
  // Descendant closures of the resolved anchors; absent when that hint was absent.
  std::optional<std::set<SubjectId>> subjects;
  std::optional<std::set<TemporalId>> temporals;

  bool admits(SubjectId s, TemporalId t) const {
    return (!subjects || subjects->count(s) != 0) && (!temporals || temporals->count(t) != 0);
  }
};

// At least one hint must be given. Throws AnchorNotResolved when a given hint
// does not resolve.
ForwardResult forward_traverse(const SATGraph& g, const std::optional<std::string>& subject_hint,
                               const std::optional<std::string>& temporal_hint, Embedder& embedder,
                               double tau);

// Anchor contexts of the resolved attribute(s), kept together with the
// attribute they lead to.
struct ReverseResult {
  std::set<AttributeId> attributes;
  std::set<CompositeKey> keys;
};
ReverseResult reverse_traverse(const SATGraph& g, std::string_view attribute_hint, Embedder& embedder,
                               double tau);

// Keys admitted by whichever paths ran. Throws EmptyIntersection when both ran
// and share nothing; never returns a key without leaves.
std::set<CompositeKey> intersect_paths(const SATGraph& g, const ForwardResult* forward,
                                       const ReverseResult* reverse);

// Keys either path admits on its own; the fallback after EmptyIntersection.
std::set<CompositeKey> union_paths(const SATGraph& g, const ForwardResult* forward,
                                   const ReverseResult* reverse);

// The text a key is scored by: subject, temporal and attribute labels.
std::string key_text(const SATGraph& g, const CompositeKey& key);

// One tuple per leaf, score descending, then cell_id ascending.
std::vector<EvidenceTuple> score_candidates(const SATGraph& g, const std::set<CompositeKey>& keys,
                                            const Query& q, Embedder& embedder);

// Sibling temporal nodes (same parent and granularity) within +-radius
// chronological positions for comparisons; sibling subjects under the same
// parent for breakdowns; nothing for point lookups.
std::vector<EvidenceTuple> expand_neighbors(const SATGraph& g, const EvidenceTuple& focal, Intent intent,
                                            std::size_t radius);

bool tuple_less(const EvidenceTuple& a, const EvidenceTuple& b);

struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  std::string passage_id;  // set for passage chunks
  std::string table_id;    // set for row chunks
  std::string text;
  std::vector<std::string> cell_ids;  // data cells of a row chunk
};

// Passages as-is plus one chunk per table row ("caption: cell | cell ...").
std::vector<Chunk> build_chunks(const Corpus& corpus);

struct ScoredChunk {
  std::size_t index = 0;  // into the chunk list
  double score = 0.0;
};

// Top-k by cosine, ties by chunk_id.
std::vector<ScoredChunk> baseline_chunk_retrieve(const std::vector<Chunk>& chunks, const Query& q,
                                                 Embedder& embedder, std::size_t k);

struct RetrievalDiagnostics {
  std::vector<std::string> notes;
  std::size_t resolved_subjects = 0;
  std::size_t resolved_temporals = 0;
  std::size_t resolved_attributes = 0;
  std::size_t forward_attributes = 0;
  std::size_t reverse_keys = 0;
  std::size_t intersection_keys = 0;
  bool fell_back_to_union = false;
  std::size_t focal = 0;
  std::size_t expansion_added = 0;

  nlohmann::json to_json() const;
};

struct RetrievalResult {
  QuerySlots slots;
  std::vector<EvidenceTuple> tuples;
  std::vector<ScoredChunk> chunks;  // chunk-baseline mode only
  RetrievalDiagnostics diagnostics;
};

struct RetrievalContext {
  const SATGraph& graph;
  const std::vector<Chunk>& chunks;
  Embedder& embedder;
  QueryAnalyzer& analyzer;
};

// analyze -> traverse -> intersect -> score -> expand -> truncate. Focal
// tuples come first, expansions after them, so results are prefix-stable in
// top_k and disabling expansion only removes tuples. NoSlots and
// AnchorNotResolved produce an empty result with a note.
RetrievalResult retrieve(const RetrievalContext& ctx, const Query& q, const RetrievalConfig& cfg);

}  // namespace satrag
