#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "satrag/cellgroups.hpp"
#include "satrag/providers.hpp"
#include "satrag/temporal.hpp"

namespace satrag {

// Content-derived node identifier; the tag keeps the four id spaces apart.
template <class Tag>
struct NodeId {
  std::uint64_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

struct SubjectTag {};
struct TemporalTag {};
struct AttributeTag {};
struct LeafTag {};
using SubjectId = NodeId<SubjectTag>;
using TemporalId = NodeId<TemporalTag>;
using AttributeId = NodeId<AttributeTag>;
using LeafId = NodeId<LeafTag>;

template <class Tag>
std::string to_string(NodeId<Tag> id);

struct SubjectNode {
  SubjectId id;
  std::string label;
  std::optional<SubjectId> parent;
  bool sentinel = false;  // stands in for facts without a subject

  bool operator==(const SubjectNode&) const = default;
};

struct TemporalNode {
  TemporalId id;
  std::string raw_label;
  TemporalValue normalized;  // NotTemporal only for the sentinel
  std::optional<TemporalId> parent;
  bool sentinel = false;  // stands in for facts without a period

  bool operator==(const TemporalNode&) const = default;
};

using Anchor = std::pair<SubjectId, TemporalId>;

struct AttributeNode {
  AttributeId id;
  std::string label;
  std::set<Anchor> anchors;

  bool operator==(const AttributeNode&) const = default;
};

struct CompositeKey {
  SubjectId subject;
  TemporalId temporal;
  AttributeId attribute;

  auto operator<=>(const CompositeKey&) const = default;
};

struct Provenance {
  std::string cell_id;
  std::string table_id;
  std::string doc_id;

  bool operator==(const Provenance&) const = default;
};

struct ValueLeaf {
  LeafId id;
  std::string value;
  CompositeKey key;
  Provenance provenance;

  bool operator==(const ValueLeaf&) const = default;
};

// A cell group routed into subject / temporal / attribute roles.
struct FactTuple {
  std::vector<std::string> subject_path;  // root to leaf; empty means no subject
  std::string temporal_raw;               // empty means no period
  std::string attribute;
  std::string value;
  Provenance provenance;

  bool operator==(const FactTuple&) const = default;
};

struct SATGraph {
  std::map<SubjectId, SubjectNode> subjects;
  std::map<TemporalId, TemporalNode> temporals;
  std::map<AttributeId, AttributeNode> attributes;
  std::map<LeafId, ValueLeaf> leaves;
  std::map<CompositeKey, std::set<LeafId>> index;
  std::string corpus_hash;

  bool operator==(const SATGraph&) const = default;

  const SubjectNode& subject(SubjectId id) const { return subjects.at(id); }
  const TemporalNode& temporal(TemporalId id) const { return temporals.at(id); }
  const AttributeNode& attribute(AttributeId id) const { return attributes.at(id); }
  const ValueLeaf& leaf(LeafId id) const { return leaves.at(id); }
};

inline const char* kNoSubjectLabel = "(no subject)";
inline const char* kNoPeriodLabel = "(no period)";

// Throws NoAttribute when every header element lands in the subject or
// temporal slot.
FactTuple lift_cell_group(const CellGroup& cg, SubjectExtractor& subject_extractor);

struct LiftReport {
  std::vector<FactTuple> facts;
  std::vector<std::string> rejected_cell_ids;  // NoAttribute
};
LiftReport lift_all(const std::vector<CellGroup>& groups, SubjectExtractor& subject_extractor);

// Order-insensitive: any permutation of the same facts yields an equal graph.
// A repeated cell_id keeps a single leaf (from the smallest such fact).
SATGraph build_graph(const std::vector<FactTuple>& facts);

// Hash of the cell-group records the graph was built from.
std::string corpus_hash(const std::vector<CellGroup>& groups);

// Structural helpers over a built graph.
std::vector<SubjectId> subject_children(const SATGraph& g, std::optional<SubjectId> parent);
// Chronological order (interval start, then canonical form).
std::vector<TemporalId> temporal_children(const SATGraph& g, std::optional<TemporalId> parent);
std::set<SubjectId> subject_descendants(const SATGraph& g, SubjectId root);  // includes root
std::set<TemporalId> temporal_descendants(const SATGraph& g, TemporalId root);
std::vector<SubjectId> subject_path_ids(const SATGraph& g, SubjectId leaf);  // root first
std::map<std::string, LeafId> leaves_by_cell(const SATGraph& g);

struct ValidationFinding {
  // acyclic, key-components, subject-uniqueness, attribute-uniqueness, bijection,
  // index-inverse, orphan-attribute, anchor-soundness, temporal-containment,
  // dangling-provenance
  std::string check;
  std::string detail;

  bool operator==(const ValidationFinding&) const = default;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  std::size_t subjects = 0;
  std::size_t temporals = 0;
  std::size_t attributes = 0;
  std::size_t leaves = 0;
  std::size_t keys = 0;

  bool ok() const { return findings.empty(); }
  bool has(const std::string& check) const;
  bool operator==(const ValidationReport&) const = default;
};

// When known_cells is given, every leaf's provenance must name one of them.
ValidationReport validate_graph(const SATGraph& g,
                                const std::set<std::string>* known_cells = nullptr);

inline constexpr int kGraphFormatVersion = 1;

nlohmann::json graph_to_json(const SATGraph& g);
// Throws VersionMismatch or CorruptIndex.
SATGraph graph_from_json(const nlohmann::json& j);

void save_graph(const SATGraph& g, const std::filesystem::path& path);
// Throws IoFailure, VersionMismatch or CorruptIndex.
SATGraph load_graph(const std::filesystem::path& path);

}  // namespace satrag
