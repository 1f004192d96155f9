#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace satrag {

struct CellCoord {
  std::size_t row = 0;
  std::size_t col = 0;

  auto operator<=>(const CellCoord&) const = default;
};

enum class HeaderType { RowHeader, ColumnHeader };

enum class TableCategory { Flat1D, Flat2D, Hierarchical1D, Hierarchical2D };

std::string_view to_string(HeaderType type);
std::string_view to_string(TableCategory category);

struct RawCell {
  std::size_t row = 0;
  std::size_t col = 0;
  std::string content;
  bool is_header = false;
};

// Merged region anchored at its top-left cell.
struct Span {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t row_span = 1;
  std::size_t col_span = 1;

  bool contains(std::size_t r, std::size_t c) const {
    return r >= row && r < row + row_span && c >= col && c < col + col_span;
  }
  bool operator==(const Span&) const = default;
};

struct Table {
  std::string table_id;
  std::string doc_id;
  std::string caption;
  // Row-major; covered (non-anchor) positions of a span hold empty content.
  std::vector<std::vector<RawCell>> grid;
  std::vector<Span> spans;
  TableCategory category = TableCategory::Flat2D;
  // Number of passages that precede the table in reading order.
  std::size_t anchor = 0;
  // Rows the markup itself marks as headers (Markdown header line, <th> rows).
  std::size_t marked_header_rows = 0;

  std::size_t rows() const { return grid.size(); }
  std::size_t cols() const { return grid.empty() ? 0 : grid.front().size(); }
  const RawCell& at(std::size_t r, std::size_t c) const { return grid.at(r).at(c); }

  // Top-left coordinate of the span covering (r, c), or (r, c) itself.
  CellCoord anchor_of(std::size_t r, std::size_t c) const;
  // Content seen at (r, c) once spans are resolved.
  const std::string& resolved(std::size_t r, std::size_t c) const;
};

struct Passage {
  std::string passage_id;
  std::string doc_id;
  std::string text;
  std::size_t position = 0;
};

struct Document {
  std::string doc_id;
  std::string title;
  // Central subject when the corpus annotates one; filled later by enrichment otherwise.
  std::string entity;
  std::vector<Passage> passages;
  std::vector<Table> tables;
};

struct HeaderAnnotation {
  CellCoord coordinate;
  HeaderType header_type = HeaderType::ColumnHeader;
  unsigned tier = 1;

  bool operator==(const HeaderAnnotation&) const = default;
};

struct ParseReport {
  struct PaddedRow {
    std::size_t table_index = 0;
    std::size_t row = 0;
    std::size_t added_cells = 0;
  };
  std::vector<PaddedRow> padded_rows;
};

enum class InputFormat { Markdown, StructuredGrid };
enum class TableFormat { Markdown, Html };

// Markdown input may carry pipe tables and inline <table> blocks.
Document parse_document(std::string_view raw, InputFormat format, std::string_view doc_id = "doc",
                        ParseReport* report = nullptr);

Table parse_table(std::string_view markup, TableFormat format, ParseReport* report = nullptr);

// Markdown cannot express spans; tables with spans must use Html.
std::string serialize_table(const Table& table, TableFormat format);

// Throws MalformedInput when the grid is ragged or spans are out of bounds/overlapping.
void validate_table(const Table& table);

// Marks header cells, sets table.category and returns one annotation per
// header coordinate (covered span positions included). Throws
// HeaderDetectionAmbiguous when no header row or column can be found.
std::vector<HeaderAnnotation> classify_headers(Table& table);

// Single-tier fallback used after HeaderDetectionAmbiguous: row 0 becomes the
// only column header (tables with a single row get no headers).
std::vector<HeaderAnnotation> default_header_annotations(Table& table);

// classify_headers with the fallback applied.
std::vector<HeaderAnnotation> annotate_headers(Table& table);

// Structured-grid interchange format (one document per file).
Document document_from_json(const nlohmann::json& j);
nlohmann::json document_to_json(const Document& doc);

}  // namespace satrag
