#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "satrag/ingest.hpp"

namespace satrag {

inline constexpr std::size_t kDefaultContextBudget = 512;

struct DocumentMetadata {
  std::string doc_id;
  std::string title;
  std::string entity;
  std::string context_snippet;

  bool operator==(const DocumentMetadata&) const = default;
};

struct HeaderPathElement {
  std::string label;
  HeaderType header_type = HeaderType::ColumnHeader;
  unsigned tier = 1;
  CellCoord index;

  bool operator==(const HeaderPathElement&) const = default;
};

// One data cell with everything needed to interpret it in isolation.
struct CellGroup {
  std::string cell_id;  // doc_id/table_id/row/col
  std::string value;
  DocumentMetadata doc_meta;
  std::string table_id;
  std::string table_caption;
  // Column-header elements by ascending tier, then row-header elements by ascending tier.
  std::vector<HeaderPathElement> header_path;
  CellCoord coordinate;

  bool operator==(const CellGroup&) const = default;
};

std::string make_cell_id(std::string_view doc_id, std::string_view table_id, std::size_t row,
                         std::size_t col);

DocumentMetadata extract_global_metadata(const Document& doc,
                                         std::size_t context_budget = kDefaultContextBudget);

// Throws NotADataCell for header coordinates and covered span positions.
std::vector<HeaderPathElement> header_path(const Table& table,
                                           const std::vector<HeaderAnnotation>& annotations,
                                           CellCoord coordinate);

// One group per non-header, non-empty data cell, in row-major order.
std::vector<CellGroup> decompose_table(const Table& table,
                                       const std::vector<HeaderAnnotation>& annotations,
                                       const DocumentMetadata& doc_meta);

// Annotates every table of the document (with the single-tier fallback) and
// decomposes it.
std::vector<CellGroup> decompose_document(Document& doc,
                                          std::size_t context_budget = kDefaultContextBudget);

nlohmann::json cell_group_to_json(const CellGroup& group);
CellGroup cell_group_from_json(const nlohmann::json& j);

// Line-delimited records, one group per line.
std::string cell_groups_to_jsonl(const std::vector<CellGroup>& groups);
std::vector<CellGroup> cell_groups_from_jsonl(std::string_view jsonl);

}  // namespace satrag
