#include "satrag/cellgroups.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "satrag/error.hpp"
#include "satrag/text.hpp"

namespace satrag {

std::string make_cell_id(std::string_view doc_id, std::string_view table_id, std::size_t row,
                         std::size_t col) {
  std::string id;
  id.reserve(doc_id.size() + table_id.size() + 16);
  id.append(doc_id).append("/").append(table_id);
  id.append("/").append(std::to_string(row)).append("/").append(std::to_string(col));
  return id;
}

DocumentMetadata extract_global_metadata(const Document& doc, std::size_t context_budget) {
  DocumentMetadata meta;
  meta.doc_id = doc.doc_id;
  meta.title = doc.title;
  meta.entity = doc.entity;
  if (!doc.passages.empty()) {
    meta.context_snippet = text::utf8_truncate(doc.passages.front().text, context_budget);
  }
  return meta;
}

std::vector<HeaderPathElement> header_path(const Table& table,
                                           const std::vector<HeaderAnnotation>& annotations,
                                           CellCoord coordinate) {
  if (coordinate.row >= table.rows() || coordinate.col >= table.cols()) {
    throw Error(ErrorCode::NotADataCell, "coordinate outside table '" + table.table_id + "'");
  }
  std::map<CellCoord, const HeaderAnnotation*> by_coord;
  for (const auto& a : annotations) by_coord[a.coordinate] = &a;

  if (by_coord.count(coordinate) != 0) {
    throw Error(ErrorCode::NotADataCell, "(" + std::to_string(coordinate.row) + "," +
                                             std::to_string(coordinate.col) +
                                             ") is a header cell");
  }
  if (table.anchor_of(coordinate.row, coordinate.col) != coordinate) {
    throw Error(ErrorCode::NotADataCell, "(" + std::to_string(coordinate.row) + "," +
                                             std::to_string(coordinate.col) +
                                             ") is covered by a merged cell");
  }

  std::vector<HeaderPathElement> column_part;
  std::vector<HeaderPathElement> row_part;
  std::set<CellCoord> seen;

  auto visit = [&](std::size_t r, std::size_t c, HeaderType wanted,
                   std::vector<HeaderPathElement>& out) {
    auto it = by_coord.find({r, c});
    if (it == by_coord.end() || it->second->header_type != wanted) return;
    const CellCoord anchor = table.anchor_of(r, c);
    if (!seen.insert(anchor).second) return;
    const auto& label = table.at(anchor.row, anchor.col).content;
    if (text::is_blank(label)) return;
    auto anchor_it = by_coord.find(anchor);
    const unsigned tier = anchor_it != by_coord.end() ? anchor_it->second->tier : it->second->tier;
    out.push_back({label, wanted, tier, anchor});
  };

  for (std::size_t r = 0; r < coordinate.row; ++r) {
    visit(r, coordinate.col, HeaderType::ColumnHeader, column_part);
  }
  for (std::size_t c = 0; c < coordinate.col; ++c) {
    visit(coordinate.row, c, HeaderType::RowHeader, row_part);
  }
  auto by_tier = [](const HeaderPathElement& a, const HeaderPathElement& b) { return a.tier < b.tier; };
  std::stable_sort(column_part.begin(), column_part.end(), by_tier);
  std::stable_sort(row_part.begin(), row_part.end(), by_tier);

  column_part.insert(column_part.end(), row_part.begin(), row_part.end());
  return column_part;
}

std::vector<CellGroup> decompose_table(const Table& table,
                                       const std::vector<HeaderAnnotation>& annotations,
                                       const DocumentMetadata& doc_meta) {
  std::set<CellCoord> header_coords;
  for (const auto& a : annotations) header_coords.insert(a.coordinate);

  std::vector<CellGroup> groups;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      const CellCoord coord{r, c};
      if (header_coords.count(coord) != 0) continue;
      if (table.anchor_of(r, c) != coord) continue;
      const auto& content = table.at(r, c).content;
      if (text::is_blank(content)) continue;

      CellGroup g;
      g.cell_id = make_cell_id(doc_meta.doc_id, table.table_id, r, c);
      g.value = content;
      g.doc_meta = doc_meta;
      g.table_id = table.table_id;
      g.table_caption = table.caption;
      g.header_path = header_path(table, annotations, coord);
      g.coordinate = coord;
      groups.push_back(std::move(g));
    }
  }
  return groups;
}

std::vector<CellGroup> decompose_document(Document& doc, std::size_t context_budget) {
  const auto meta = extract_global_metadata(doc, context_budget);
  std::vector<CellGroup> groups;
  for (auto& table : doc.tables) {
    const auto annotations = annotate_headers(table);
    auto part = decompose_table(table, annotations, meta);
    groups.insert(groups.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  return groups;
}

nlohmann::json cell_group_to_json(const CellGroup& g) {
  nlohmann::json path = nlohmann::json::array();
  for (const auto& e : g.header_path) {
    path.push_back({{"label", e.label},
                    {"header_type", std::string(to_string(e.header_type))},
                    {"tier", e.tier},
                    {"index", {e.index.row, e.index.col}}});
  }
  return {{"cell_id", g.cell_id},
          {"value", g.value},
          {"doc_meta",
           {{"doc_id", g.doc_meta.doc_id},
            {"title", g.doc_meta.title},
            {"entity", g.doc_meta.entity},
            {"context_snippet", g.doc_meta.context_snippet}}},
          {"table_id", g.table_id},
          {"table_caption", g.table_caption},
          {"header_path", std::move(path)},
          {"coordinate", {g.coordinate.row, g.coordinate.col}}};
}

CellGroup cell_group_from_json(const nlohmann::json& j) {
  try {
    CellGroup g;
    g.cell_id = j.at("cell_id").get<std::string>();
    g.value = j.at("value").get<std::string>();
    const auto& m = j.at("doc_meta");
    g.doc_meta.doc_id = m.at("doc_id").get<std::string>();
    g.doc_meta.title = m.value("title", "");
    g.doc_meta.entity = m.value("entity", "");
    g.doc_meta.context_snippet = m.value("context_snippet", "");
    g.table_id = j.at("table_id").get<std::string>();
    g.table_caption = j.value("table_caption", "");
    for (const auto& je : j.at("header_path")) {
      HeaderPathElement e;
      e.label = je.at("label").get<std::string>();
      e.header_type = je.at("header_type").get<std::string>() == "row-header" ? HeaderType::RowHeader
                                                                              : HeaderType::ColumnHeader;
      e.tier = je.at("tier").get<unsigned>();
      e.index = {je.at("index").at(0).get<std::size_t>(), je.at("index").at(1).get<std::size_t>()};
      g.header_path.push_back(std::move(e));
    }
    g.coordinate = {j.at("coordinate").at(0).get<std::size_t>(),
                    j.at("coordinate").at(1).get<std::size_t>()};
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, std::string("bad cell group record: ") + e.what());
  }
}

std::string cell_groups_to_jsonl(const std::vector<CellGroup>& groups) {
  std::string out;
  for (const auto& g : groups) {
    out += cell_group_to_json(g).dump();
    out += '\n';
  }
  return out;
}

std::vector<CellGroup> cell_groups_from_jsonl(std::string_view jsonl) {
  std::vector<CellGroup> groups;
  std::size_t line_no = 0;
  for (const auto& line : text::split(jsonl, '\n')) {
    ++line_no;
    if (text::is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedInput,
                  "cell group line " + std::to_string(line_no) + ": " + e.what());
    }
    groups.push_back(cell_group_from_json(j));
  }
  return groups;
}

}  // namespace satrag
