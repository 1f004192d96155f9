#include <algorithm>
#include <map>

#include "satrag/error.hpp"
#include "satrag/ingest.hpp"
#include "satrag/temporal.hpp"
#include "satrag/text.hpp"

namespace satrag {

namespace {

// Blank, textual and temporal cells may sit in a header; plain numbers may not.
bool header_like(const std::string& content) {
  if (text::is_blank(content)) return true;
  if (!text::parse_number(content)) return true;
  return normalize_temporal(content).is_temporal();
}

struct Layout {
  std::size_t header_rows = 0;
  std::size_t header_cols = 0;
};

Layout detect_layout(const Table& table) {
  const std::size_t nr = table.rows();
  const std::size_t nc = table.cols();

  bool any_numeric = false;
  for (std::size_t r = 0; r < nr && !any_numeric; ++r) {
    for (std::size_t c = 0; c < nc; ++c) {
      if (!header_like(table.resolved(r, c))) {
        any_numeric = true;
        break;
      }
    }
  }

  Layout layout;
  if (!any_numeric) {
    // Text-only grid: trust the markup's own header marks and treat the first
    // column as keys.
    layout.header_rows = std::min(table.marked_header_rows, nr > 0 ? nr - 1 : 0);
    layout.header_cols = nc >= 2 ? 1 : 0;
    return layout;
  }

  auto row_is_header = [&](std::size_t r) {
    bool non_blank = false;
    for (std::size_t c = 0; c < nc; ++c) {
      const auto& content = table.resolved(r, c);
      if (!header_like(content)) return false;
      if (!text::is_blank(content)) non_blank = true;
    }
    return non_blank;
  };
  while (layout.header_rows + 1 < nr && row_is_header(layout.header_rows)) ++layout.header_rows;

  auto col_is_header = [&](std::size_t c) {
    bool non_blank = false;
    for (std::size_t r = layout.header_rows; r < nr; ++r) {
      const auto& content = table.resolved(r, c);
      if (!header_like(content)) return false;
      if (!text::is_blank(content)) non_blank = true;
    }
    return non_blank;
  };
  while (layout.header_cols + 1 < nc && col_is_header(layout.header_cols)) ++layout.header_cols;
  return layout;
}

std::vector<HeaderAnnotation> finish(Table& table, const Layout& layout) {
  std::map<CellCoord, HeaderAnnotation> by_coord;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (r < layout.header_rows) {
        by_coord[{r, c}] = {{r, c}, HeaderType::ColumnHeader, static_cast<unsigned>(r + 1)};
      } else if (c < layout.header_cols) {
        by_coord[{r, c}] = {{r, c}, HeaderType::RowHeader, static_cast<unsigned>(c + 1)};
      }
    }
  }
  // Covered positions of a merged header take the anchor's annotation.
  bool span_in_header = false;
  for (const auto& span : table.spans) {
    auto anchor_it = by_coord.find({span.row, span.col});
    if (anchor_it == by_coord.end()) continue;
    span_in_header = true;
    const HeaderAnnotation anchor = anchor_it->second;
    for (std::size_t r = span.row; r < span.row + span.row_span; ++r) {
      for (std::size_t c = span.col; c < span.col + span.col_span; ++c) {
        by_coord[{r, c}] = {{r, c}, anchor.header_type, anchor.tier};
      }
    }
  }

  std::vector<HeaderAnnotation> annotations;
  annotations.reserve(by_coord.size());
  unsigned max_tier = 0;
  for (auto& [coord, annotation] : by_coord) {
    table.grid[coord.row][coord.col].is_header = true;
    max_tier = std::max(max_tier, annotation.tier);
    annotations.push_back(annotation);
  }

  const bool two_d = layout.header_rows > 0 && layout.header_cols > 0;
  const bool hierarchical = max_tier >= 2 || span_in_header;
  if (hierarchical) {
    table.category = two_d ? TableCategory::Hierarchical2D : TableCategory::Hierarchical1D;
  } else {
    table.category = two_d ? TableCategory::Flat2D : TableCategory::Flat1D;
  }
  return annotations;
}

void clear_header_marks(Table& table) {
  for (auto& row : table.grid) {
    for (auto& cell : row) cell.is_header = false;
  }
}

}  // namespace

std::vector<HeaderAnnotation> classify_headers(Table& table) {
  clear_header_marks(table);
  if (table.rows() == 0 || table.cols() == 0) {
    throw Error(ErrorCode::HeaderDetectionAmbiguous, "table '" + table.table_id + "' is empty");
  }
  const Layout layout = detect_layout(table);
  if (layout.header_rows == 0 && layout.header_cols == 0) {
    throw Error(ErrorCode::HeaderDetectionAmbiguous,
                "table '" + table.table_id + "' has no detectable header row or column");
  }
  return finish(table, layout);
}

std::vector<HeaderAnnotation> default_header_annotations(Table& table) {
  clear_header_marks(table);
  Layout layout;
  layout.header_rows = table.rows() > 1 ? 1 : 0;
  return finish(table, layout);
}

std::vector<HeaderAnnotation> annotate_headers(Table& table) {
  try {
    return classify_headers(table);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::HeaderDetectionAmbiguous) throw;
    return default_header_annotations(table);
  }
}

}  // namespace satrag
