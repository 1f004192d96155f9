#include <cctype>
#include <cstdlib>

#include "internal.hpp"
#include "satrag/error.hpp"
#include "satrag/text.hpp"

namespace satrag::detail {

namespace {

struct Tag {
  std::string name;  // lower-case, without '/'
  bool closing = false;
  std::string attributes;
  std::size_t end = 0;  // one past '>'
};

bool iequals_at(std::string_view s, std::size_t pos, std::string_view word) {
  if (pos + word.size() > s.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != word[i]) return false;
  }
  return true;
}

std::size_t ifind(std::string_view s, std::string_view word, std::size_t from = 0) {
  for (std::size_t i = from; i + word.size() <= s.size(); ++i) {
    if (iequals_at(s, i, word)) return i;
  }
  return std::string_view::npos;
}

// Reads the tag starting at s[pos] == '<'. Quoted attribute values may contain '>'.
std::optional<Tag> read_tag(std::string_view s, std::size_t pos) {
  if (s.compare(pos, 4, "<!--") == 0) {
    auto close = s.find("-->", pos + 4);
    if (close == std::string_view::npos) return std::nullopt;
    Tag t;
    t.name = "!--";
    t.end = close + 3;
    return t;
  }
  std::size_t i = pos + 1;
  Tag tag;
  if (i < s.size() && s[i] == '/') {
    tag.closing = true;
    ++i;
  }
  std::size_t name_start = i;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '!')) ++i;
  if (i == name_start) return std::nullopt;
  tag.name = text::to_lower(s.substr(name_start, i - name_start));
  std::size_t attr_start = i;
  char quote = 0;
  while (i < s.size()) {
    char c = s[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      break;
    }
    ++i;
  }
  if (i >= s.size()) return std::nullopt;
  tag.attributes = std::string(s.substr(attr_start, i - attr_start));
  tag.end = i + 1;
  return tag;
}

std::size_t span_attribute(const std::string& attributes, std::string_view name) {
  auto pos = ifind(attributes, name);
  while (pos != std::string::npos) {
    std::size_t i = pos + name.size();
    while (i < attributes.size() && std::isspace(static_cast<unsigned char>(attributes[i]))) ++i;
    if (i < attributes.size() && attributes[i] == '=') {
      ++i;
      while (i < attributes.size() &&
             (std::isspace(static_cast<unsigned char>(attributes[i])) || attributes[i] == '"' ||
              attributes[i] == '\'')) {
        ++i;
      }
      std::size_t v = 0;
      bool any = false;
      while (i < attributes.size() && std::isdigit(static_cast<unsigned char>(attributes[i]))) {
        v = v * 10 + static_cast<std::size_t>(attributes[i] - '0');
        any = true;
        ++i;
      }
      return any && v > 0 ? v : 1;
    }
    pos = ifind(attributes, name, pos + 1);
  }
  return 1;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    std::string_view entity = s.substr(i + 1, semi - i - 1);
    if (entity == "amp") out.push_back('&');
    else if (entity == "lt") out.push_back('<');
    else if (entity == "gt") out.push_back('>');
    else if (entity == "quot") out.push_back('"');
    else if (entity == "apos" || entity == "#39") out.push_back('\'');
    else if (entity == "nbsp") out.push_back(' ');
    else if (!entity.empty() && entity[0] == '#') {
      std::string digits(entity.substr(1));
      int base = 10;
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        base = 16;
        digits.erase(0, 1);
      }
      char* end = nullptr;
      unsigned long cp = std::strtoul(digits.c_str(), &end, base);
      if (digits.empty() || *end != '\0') {
        out.push_back('&');
        continue;
      }
      append_utf8(out, cp);
    } else {
      out.push_back('&');
      continue;
    }
    i = semi;
  }
  return out;
}

std::string escape_html(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::size_t count_html_tables(std::string_view markup) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while ((pos = ifind(markup, "<table", pos)) != std::string_view::npos) {
    ++n;
    pos += 6;
  }
  return n;
}

HtmlTable parse_html_table(std::string_view markup, std::size_t table_index, ParseReport* report) {
  std::size_t pos = ifind(markup, "<table");
  if (pos == std::string_view::npos) {
    throw Error(ErrorCode::MalformedInput, "no <table> element found");
  }

  std::vector<std::vector<MarkupCell>> rows;
  std::string caption;
  bool in_caption = false;
  bool in_cell = false;
  int depth = 0;
  std::string cell_text;
  MarkupCell pending;

  auto close_cell = [&] {
    if (!in_cell) return;
    if (rows.empty()) rows.emplace_back();
    pending.content = text::collapse_whitespace(decode_entities(cell_text));
    rows.back().push_back(pending);
    in_cell = false;
    cell_text.clear();
  };

  std::size_t i = pos;
  while (i < markup.size()) {
    if (markup[i] != '<') {
      std::size_t next = markup.find('<', i);
      if (next == std::string_view::npos) next = markup.size();
      if (in_cell) cell_text.append(markup.substr(i, next - i));
      else if (in_caption) caption.append(markup.substr(i, next - i));
      i = next;
      continue;
    }
    auto tag = read_tag(markup, i);
    if (!tag) {
      // A bare '<' inside text.
      if (in_cell) cell_text.push_back('<');
      ++i;
      continue;
    }
    i = tag->end;
    const std::string& name = tag->name;
    if (name == "table") {
      if (!tag->closing) {
        if (depth > 0) throw Error(ErrorCode::MalformedInput, "nested <table> elements are not supported");
        ++depth;
      } else {
        close_cell();
        --depth;
        if (depth == 0) {
          HtmlTable out;
          out.table = layout_rows(rows, table_index, report);
          out.table.caption = text::collapse_whitespace(decode_entities(caption));
          out.consumed = i;
          return out;
        }
      }
    } else if (name == "caption") {
      in_caption = !tag->closing;
    } else if (name == "tr") {
      close_cell();
      if (!tag->closing) rows.emplace_back();
    } else if (name == "td" || name == "th") {
      close_cell();
      if (!tag->closing) {
        in_cell = true;
        pending = MarkupCell{};
        pending.header = name == "th";
        pending.row_span = span_attribute(tag->attributes, "rowspan");
        pending.col_span = span_attribute(tag->attributes, "colspan");
      }
    } else if (name == "br" || name == "p" || name == "div") {
      if (in_cell) cell_text.push_back(' ');
    }
  }
  throw Error(ErrorCode::MalformedInput, "unbalanced table markup: missing </table>");
}

std::string serialize_html_table(const Table& table) {
  std::string out = "<table>\n";
  if (!table.caption.empty()) out += "<caption>" + escape_html(table.caption) + "</caption>\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += "<tr>";
    const char* tag = r < table.marked_header_rows ? "th" : "td";
    for (std::size_t c = 0; c < table.cols(); ++c) {
      auto anchor = table.anchor_of(r, c);
      if (anchor.row != r || anchor.col != c) continue;
      out += "<";
      out += tag;
      for (const auto& span : table.spans) {
        if (span.row == r && span.col == c) {
          if (span.row_span > 1) out += " rowspan=\"" + std::to_string(span.row_span) + "\"";
          if (span.col_span > 1) out += " colspan=\"" + std::to_string(span.col_span) + "\"";
        }
      }
      out += ">" + escape_html(table.at(r, c).content) + "</" + tag + ">";
    }
    out += "</tr>\n";
  }
  out += "</table>";
  return out;
}

}  // namespace satrag::detail
