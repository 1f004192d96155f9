#include <algorithm>
#include <cctype>
#include <map>

#include "internal.hpp"
#include "satrag/error.hpp"
#include "satrag/text.hpp"

namespace satrag {

namespace detail {

namespace {

// Splits a pipe row on unescaped '|' and unescapes "\|".
std::vector<std::string> split_pipe_row(std::string_view line) {
  std::string_view t = text::trim(line);
  if (!t.empty() && t.front() == '|') t.remove_prefix(1);
  if (!t.empty() && t.back() == '|' && !(t.size() >= 2 && t[t.size() - 2] == '\\')) {
    t.remove_suffix(1);
  }
  std::vector<std::string> cells;
  std::string current;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '\\' && i + 1 < t.size() && t[i + 1] == '|') {
      current.push_back('|');
      ++i;
    } else if (t[i] == '|') {
      cells.emplace_back(text::trim(current));
      current.clear();
    } else {
      current.push_back(t[i]);
    }
  }
  cells.emplace_back(text::trim(current));
  return cells;
}

bool has_unescaped_pipe(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '|' && (i == 0 || line[i - 1] != '\\')) return true;
  }
  return false;
}

}  // namespace

std::string escape_pipe_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n' || c == '\r') out.push_back(' ');
    else out.push_back(c);
  }
  return out;
}

bool is_markdown_separator(std::string_view line) {
  auto t = text::trim(line);
  if (t.empty() || !has_unescaped_pipe(t)) {
    // A single-column separator may lack pipes only when written as "---", which
    // is ambiguous with a thematic break; require pipes.
    return false;
  }
  for (const auto& cell : split_pipe_row(t)) {
    if (cell.empty()) return false;
    std::string_view c = cell;
    if (c.front() == ':') c.remove_prefix(1);
    if (!c.empty() && c.back() == ':') c.remove_suffix(1);
    if (c.empty() || c.find_first_not_of('-') != std::string_view::npos) return false;
  }
  return true;
}

bool is_markdown_table_line(std::string_view line) {
  auto t = text::trim(line);
  return !t.empty() && t.front() == '|';
}

Table parse_markdown_table(const std::vector<std::string_view>& lines, std::size_t table_index,
                           ParseReport* report) {
  std::vector<std::vector<MarkupCell>> rows;
  bool header_marked = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 1 && is_markdown_separator(lines[i])) {
      header_marked = true;
      continue;
    }
    if (is_markdown_separator(lines[i])) continue;
    std::vector<MarkupCell> row;
    for (auto& cell : split_pipe_row(lines[i])) {
      MarkupCell mc;
      mc.content = std::move(cell);
      row.push_back(std::move(mc));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::MalformedInput, "pipe table has no rows");
  Table table = layout_rows(rows, table_index, report);
  table.marked_header_rows = header_marked ? 1 : 0;
  return table;
}

}  // namespace detail

namespace {

struct LineInfo {
  std::string_view text;
  std::size_t offset = 0;
};

std::vector<LineInfo> split_lines(std::string_view raw) {
  std::vector<LineInfo> lines;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto nl = raw.find('\n', start);
    std::size_t end = nl == std::string_view::npos ? raw.size() : nl;
    std::string_view line = raw.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, start});
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

// "# Title" -> (1, "Title").
std::optional<std::pair<int, std::string>> heading_of(std::string_view line) {
  auto t = text::trim(line);
  int level = 0;
  while (static_cast<std::size_t>(level) < t.size() && t[static_cast<std::size_t>(level)] == '#') ++level;
  if (level == 0 || level > 6) return std::nullopt;
  if (static_cast<std::size_t>(level) < t.size() && t[static_cast<std::size_t>(level)] != ' ') {
    return std::nullopt;
  }
  std::string body(text::trim(t.substr(static_cast<std::size_t>(level))));
  while (!body.empty() && body.back() == '#') body.pop_back();
  return std::make_pair(level, std::string(text::trim(body)));
}

// "**Table 3**" or "__Table 3__" occupying the whole line.
std::optional<std::string> bold_line_of(std::string_view line) {
  auto t = text::trim(line);
  for (std::string_view marker : {std::string_view("**"), std::string_view("__")}) {
    if (t.size() > 2 * marker.size() && t.substr(0, marker.size()) == marker &&
        t.substr(t.size() - marker.size()) == marker) {
      auto inner = text::trim(t.substr(marker.size(), t.size() - 2 * marker.size()));
      if (!inner.empty() && inner.find(marker) == std::string_view::npos) return std::string(inner);
    }
  }
  return std::nullopt;
}

constexpr std::size_t kCaptionWindow = 2;

Document parse_markdown_document(std::string_view raw, std::string_view doc_id,
                                 ParseReport* report) {
  Document doc;
  doc.doc_id = std::string(doc_id);
  const auto lines = split_lines(raw);
  std::map<std::size_t, std::string> caption_lines;
  std::string first_h1;
  std::string first_heading;
  std::vector<std::string> paragraph;

  auto flush_paragraph = [&] {
    if (paragraph.empty()) return;
    Passage p;
    p.doc_id = doc.doc_id;
    p.position = doc.passages.size();
    p.passage_id = "p" + std::to_string(p.position);
    p.text = text::join(paragraph, " ");
    paragraph.clear();
    doc.passages.push_back(std::move(p));
  };

  auto caption_before = [&](std::size_t line_index) -> std::string {
    for (std::size_t d = 1; d <= kCaptionWindow && d <= line_index; ++d) {
      auto it = caption_lines.find(line_index - d);
      if (it != caption_lines.end()) return it->second;
    }
    return {};
  };

  auto add_table = [&](Table table, std::size_t line_index) {
    table.doc_id = doc.doc_id;
    table.table_id = "t" + std::to_string(doc.tables.size());
    table.anchor = doc.passages.size();
    if (table.caption.empty()) table.caption = caption_before(line_index);
    doc.tables.push_back(std::move(table));
  };

  std::size_t i = 0;
  while (i < lines.size()) {
    const auto line = lines[i].text;
    const auto t = text::trim(line);
    if (t.empty()) {
      flush_paragraph();
      ++i;
      continue;
    }
    if (starts_with_icase(t, "<table")) {
      flush_paragraph();
      std::string_view rest = raw.substr(lines[i].offset);
      auto parsed = detail::parse_html_table(rest, doc.tables.size(), report);
      const std::size_t end_offset = lines[i].offset + parsed.consumed;
      add_table(std::move(parsed.table), i);
      while (i < lines.size() && lines[i].offset + lines[i].text.size() < end_offset) ++i;
      ++i;
      continue;
    }
    if (starts_with_icase(t, "</table")) {
      throw Error(ErrorCode::MalformedInput,
                  "unbalanced table markup: stray </table> at line " + std::to_string(i + 1));
    }
    if (auto h = heading_of(line)) {
      flush_paragraph();
      if (h->first == 1 && first_h1.empty()) first_h1 = h->second;
      if (first_heading.empty()) first_heading = h->second;
      caption_lines[i] = h->second;
      ++i;
      continue;
    }
    if (auto b = bold_line_of(line)) {
      flush_paragraph();
      caption_lines[i] = *b;
      ++i;
      continue;
    }
    const bool pipe_start =
        detail::is_markdown_table_line(line) ||
        (line.find('|') != std::string_view::npos && i + 1 < lines.size() &&
         detail::is_markdown_separator(lines[i + 1].text));
    if (pipe_start) {
      flush_paragraph();
      const std::size_t start = i;
      std::vector<std::string_view> block;
      while (i < lines.size() && !text::is_blank(lines[i].text) &&
             (detail::is_markdown_table_line(lines[i].text) ||
              lines[i].text.find('|') != std::string_view::npos)) {
        block.push_back(lines[i].text);
        ++i;
      }
      add_table(detail::parse_markdown_table(block, doc.tables.size(), report), start);
      continue;
    }
    paragraph.emplace_back(t);
    ++i;
  }
  flush_paragraph();

  doc.title = !first_h1.empty() ? first_h1 : first_heading;
  if (doc.passages.empty() && doc.tables.empty()) {
    throw Error(ErrorCode::EmptyDocument, "document '" + doc.doc_id + "' has no passages or tables");
  }
  return doc;
}

}  // namespace

Document parse_document(std::string_view raw, InputFormat format, std::string_view doc_id,
                        ParseReport* report) {
  if (text::is_blank(raw)) {
    throw Error(ErrorCode::EmptyDocument, "empty input for document '" + std::string(doc_id) + "'");
  }
  if (format == InputFormat::Markdown) return parse_markdown_document(raw, doc_id, report);

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedInput, std::string("structured-grid input is not valid JSON: ") + e.what());
  }
  return document_from_json(j);
}

Table parse_table(std::string_view markup, TableFormat format, ParseReport* report) {
  if (format == TableFormat::Html) {
    auto parsed = detail::parse_html_table(markup, 0, report);
    if (detail::count_html_tables(markup.substr(parsed.consumed)) > 0) {
      throw Error(ErrorCode::MultipleTables, "markup contains more than one <table>");
    }
    return std::move(parsed.table);
  }

  const auto lines = split_lines(markup);
  std::vector<std::vector<std::string_view>> blocks;
  bool in_block = false;
  for (const auto& line : lines) {
    const bool table_line = !text::is_blank(line.text) &&
                            (detail::is_markdown_table_line(line.text) ||
                             line.text.find('|') != std::string_view::npos);
    if (table_line) {
      if (!in_block) blocks.emplace_back();
      blocks.back().push_back(line.text);
      in_block = true;
    } else {
      in_block = false;
    }
  }
  if (blocks.empty()) throw Error(ErrorCode::MalformedInput, "no pipe table found");
  if (blocks.size() > 1) throw Error(ErrorCode::MultipleTables, "markup contains more than one pipe table");
  return detail::parse_markdown_table(blocks.front(), 0, report);
}

std::string serialize_table(const Table& table, TableFormat format) {
  if (format == TableFormat::Html) return detail::serialize_html_table(table);
  if (!table.spans.empty()) {
    throw Error(ErrorCode::MalformedInput, "pipe tables cannot express merged cells; use HTML");
  }
  std::string out;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += "|";
    for (std::size_t c = 0; c < table.cols(); ++c) {
      out += " " + detail::escape_pipe_cell(table.at(r, c).content) + " |";
    }
    out += "\n";
    if (r == 0) {
      out += "|";
      for (std::size_t c = 0; c < table.cols(); ++c) out += " --- |";
      out += "\n";
    }
  }
  return out;
}

}  // namespace satrag
