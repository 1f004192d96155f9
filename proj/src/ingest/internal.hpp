#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "satrag/ingest.hpp"

namespace satrag::detail {

// A cell as it appears in markup, before span expansion.
struct MarkupCell {
  std::string content;
  std::size_t row_span = 1;
  std::size_t col_span = 1;
  bool header = false;
};

// Places markup rows on a grid, expanding spans and padding ragged rows.
// Spans running past the last row are clamped.
Table layout_rows(const std::vector<std::vector<MarkupCell>>& rows, std::size_t table_index,
                  ParseReport* report);

Table parse_markdown_table(const std::vector<std::string_view>& lines, std::size_t table_index,
                           ParseReport* report);

struct HtmlTable {
  Table table;
  std::size_t consumed = 0;  // bytes up to and including </table>
};

// Parses the first <table> element of markup; throws MalformedInput when it
// is unbalanced or nested.
HtmlTable parse_html_table(std::string_view markup, std::size_t table_index, ParseReport* report);

std::size_t count_html_tables(std::string_view markup);
std::string serialize_html_table(const Table& table);

std::string escape_pipe_cell(std::string_view s);

bool is_markdown_table_line(std::string_view line);
bool is_markdown_separator(std::string_view line);

}  // namespace satrag::detail
