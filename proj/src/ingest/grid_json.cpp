#include <algorithm>
#include <set>

#include "internal.hpp"
#include "satrag/error.hpp"
#include "satrag/text.hpp"

namespace satrag {

std::string_view to_string(HeaderType type) {
  return type == HeaderType::RowHeader ? "row-header" : "column-header";
}

std::string_view to_string(TableCategory category) {
  switch (category) {
    case TableCategory::Flat1D: return "flat-1d";
    case TableCategory::Flat2D: return "flat-2d";
    case TableCategory::Hierarchical1D: return "hierarchical-1d";
    case TableCategory::Hierarchical2D: return "hierarchical-2d";
  }
  return "flat-2d";
}

CellCoord Table::anchor_of(std::size_t r, std::size_t c) const {
  for (const auto& span : spans) {
    if (span.contains(r, c)) return {span.row, span.col};
  }
  return {r, c};
}

const std::string& Table::resolved(std::size_t r, std::size_t c) const {
  auto a = anchor_of(r, c);
  return at(a.row, a.col).content;
}

void validate_table(const Table& table) {
  const std::size_t width = table.cols();
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (table.grid[r].size() != width) {
      throw Error(ErrorCode::MalformedInput, "table '" + table.table_id + "' row " +
                                                 std::to_string(r) + " has " +
                                                 std::to_string(table.grid[r].size()) +
                                                 " cells, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto& cell = table.grid[r][c];
      if (cell.row != r || cell.col != c) {
        throw Error(ErrorCode::MalformedInput, "table '" + table.table_id +
                                                   "' cell coordinates disagree with position");
      }
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> covered;
  for (const auto& span : table.spans) {
    if (span.row_span == 0 || span.col_span == 0 || span.row + span.row_span > table.rows() ||
        span.col + span.col_span > width) {
      throw Error(ErrorCode::MalformedInput,
                  "table '" + table.table_id + "' span at (" + std::to_string(span.row) + "," +
                      std::to_string(span.col) + ") lies outside the " +
                      std::to_string(table.rows()) + "x" + std::to_string(width) + " grid");
    }
    for (std::size_t r = span.row; r < span.row + span.row_span; ++r) {
      for (std::size_t c = span.col; c < span.col + span.col_span; ++c) {
        if (!covered.emplace(r, c).second) {
          throw Error(ErrorCode::MalformedInput,
                      "table '" + table.table_id + "' has overlapping spans at (" +
                          std::to_string(r) + "," + std::to_string(c) + ")");
        }
      }
    }
  }
}

namespace detail {

Table layout_rows(const std::vector<std::vector<MarkupCell>>& rows, std::size_t table_index,
                  ParseReport* report) {
  const std::size_t nrows = rows.size();
  std::vector<std::vector<bool>> occupied(nrows);
  std::vector<std::vector<std::string>> content(nrows);
  std::vector<Span> spans;

  auto ensure = [&](std::size_t r, std::size_t width) {
    if (occupied[r].size() < width) {
      occupied[r].resize(width, false);
      content[r].resize(width);
    }
  };

  for (std::size_t r = 0; r < nrows; ++r) {
    std::size_t c = 0;
    for (const auto& cell : rows[r]) {
      ensure(r, c + 1);
      while (occupied[r][c]) {
        ++c;
        ensure(r, c + 1);
      }
      const std::size_t row_span = std::min(std::max<std::size_t>(cell.row_span, 1), nrows - r);
      const std::size_t col_span = std::max<std::size_t>(cell.col_span, 1);
      for (std::size_t rr = r; rr < r + row_span; ++rr) {
        ensure(rr, c + col_span);
        for (std::size_t cc = c; cc < c + col_span; ++cc) occupied[rr][cc] = true;
      }
      content[r][c] = cell.content;
      if (row_span > 1 || col_span > 1) spans.push_back({r, c, row_span, col_span});
      c += col_span;
    }
  }

  std::size_t width = 0;
  for (const auto& row : occupied) width = std::max(width, row.size());

  Table table;
  table.grid.resize(nrows);
  for (std::size_t r = 0; r < nrows; ++r) {
    std::size_t filled = static_cast<std::size_t>(std::count(occupied[r].begin(), occupied[r].end(), true));
    if (filled < width && report != nullptr) {
      report->padded_rows.push_back({table_index, r, width - filled});
    }
    ensure(r, width);
    table.grid[r].reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
      table.grid[r].push_back(RawCell{r, c, content[r][c], false});
    }
  }
  table.spans = std::move(spans);

  std::size_t marked = 0;
  while (marked < rows.size() && !rows[marked].empty() &&
         std::all_of(rows[marked].begin(), rows[marked].end(),
                     [](const MarkupCell& cell) { return cell.header; })) {
    ++marked;
  }
  table.marked_header_rows = marked;
  return table;
}

}  // namespace detail

namespace {

using nlohmann::json;

std::string required_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error(ErrorCode::MalformedInput, where + ": missing string field '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

std::string optional_string(const json& j, const char* key) {
  if (j.contains(key) && j.at(key).is_string()) return j.at(key).get<std::string>();
  return {};
}

Table table_from_json(const json& jt, const std::string& doc_id, std::size_t default_anchor) {
  Table table;
  table.doc_id = doc_id;
  table.table_id = required_string(jt, "table_id", "table");
  table.caption = optional_string(jt, "caption");
  const std::string where = "table '" + table.table_id + "'";

  if (!jt.contains("grid") || !jt.at("grid").is_array()) {
    throw Error(ErrorCode::MalformedInput, where + ": missing grid");
  }
  const auto& jgrid = jt.at("grid");
  std::size_t width = 0;
  for (std::size_t r = 0; r < jgrid.size(); ++r) {
    const auto& jrow = jgrid[r];
    if (!jrow.is_array()) throw Error(ErrorCode::MalformedInput, where + ": grid row is not a list");
    if (r == 0) width = jrow.size();
    if (jrow.size() != width) {
      throw Error(ErrorCode::MalformedInput, where + ": non-rectangular grid (row " +
                                                 std::to_string(r) + " has " +
                                                 std::to_string(jrow.size()) + " cells, expected " +
                                                 std::to_string(width) + ")");
    }
    std::vector<RawCell> row;
    row.reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (!jrow[c].is_string()) {
        throw Error(ErrorCode::MalformedInput, where + ": grid cells must be text");
      }
      row.push_back(RawCell{r, c, std::string(text::trim(jrow[c].get<std::string>())), false});
    }
    table.grid.push_back(std::move(row));
  }

  if (jt.contains("spans")) {
    for (const auto& js : jt.at("spans")) {
      Span span;
      try {
        span.row = js.at("row").get<std::size_t>();
        span.col = js.at("col").get<std::size_t>();
        span.row_span = js.value("row_span", std::size_t{1});
        span.col_span = js.value("col_span", std::size_t{1});
      } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, where + ": bad span record: " + e.what());
      }
      table.spans.push_back(span);
    }
  }
  table.anchor = jt.value("position", default_anchor);
  table.marked_header_rows = jt.value("header_rows", std::size_t{0});
  validate_table(table);

  // Covered positions defer to their anchor.
  for (const auto& span : table.spans) {
    for (std::size_t r = span.row; r < span.row + span.row_span; ++r) {
      for (std::size_t c = span.col; c < span.col + span.col_span; ++c) {
        if (r != span.row || c != span.col) table.grid[r][c].content.clear();
      }
    }
  }
  return table;
}

}  // namespace

Document document_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedInput, "document must be an object");
  Document doc;
  doc.doc_id = required_string(j, "doc_id", "document");
  doc.title = optional_string(j, "title");
  doc.entity = optional_string(j, "entity");

  std::set<std::string> passage_ids;
  if (j.contains("passages")) {
    for (const auto& jp : j.at("passages")) {
      Passage p;
      p.doc_id = doc.doc_id;
      p.passage_id = required_string(jp, "passage_id", "passage");
      p.text = required_string(jp, "text", "passage '" + p.passage_id + "'");
      p.position = doc.passages.size();
      if (text::is_blank(p.text)) {
        throw Error(ErrorCode::MalformedInput, "passage '" + p.passage_id + "' has empty text");
      }
      if (!passage_ids.insert(p.passage_id).second) {
        throw Error(ErrorCode::MalformedInput, "duplicate passage_id '" + p.passage_id + "'");
      }
      doc.passages.push_back(std::move(p));
    }
  }
  std::set<std::string> table_ids;
  if (j.contains("tables")) {
    for (const auto& jt : j.at("tables")) {
      auto table = table_from_json(jt, doc.doc_id, doc.passages.size());
      if (!table_ids.insert(table.table_id).second) {
        throw Error(ErrorCode::MalformedInput, "duplicate table_id '" + table.table_id + "'");
      }
      doc.tables.push_back(std::move(table));
    }
  }
  if (doc.passages.empty() && doc.tables.empty()) {
    throw Error(ErrorCode::EmptyDocument, "document '" + doc.doc_id + "' has no passages or tables");
  }
  return doc;
}

nlohmann::json document_to_json(const Document& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  j["title"] = doc.title;
  if (!doc.entity.empty()) j["entity"] = doc.entity;
  j["passages"] = json::array();
  for (const auto& p : doc.passages) {
    j["passages"].push_back({{"passage_id", p.passage_id}, {"text", p.text}});
  }
  j["tables"] = json::array();
  for (const auto& t : doc.tables) {
    json jt;
    jt["table_id"] = t.table_id;
    jt["caption"] = t.caption;
    jt["grid"] = json::array();
    for (const auto& row : t.grid) {
      json jrow = json::array();
      for (const auto& cell : row) jrow.push_back(cell.content);
      jt["grid"].push_back(std::move(jrow));
    }
    jt["spans"] = json::array();
    for (const auto& s : t.spans) {
      jt["spans"].push_back(
          {{"row", s.row}, {"col", s.col}, {"row_span", s.row_span}, {"col_span", s.col_span}});
    }
    jt["position"] = t.anchor;
    if (t.marked_header_rows > 0) jt["header_rows"] = t.marked_header_rows;
    j["tables"].push_back(std::move(jt));
  }
  return j;
}

}  // namespace satrag
