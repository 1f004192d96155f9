#include <catch_amalgamated.hpp>

#include <functional>

#include "fixtures.hpp"
#include "satrag/corpus.hpp"
#include "satrag/error.hpp"
#include "satrag/ingest.hpp"

using namespace satrag;
using namespace satrag::testing;

namespace {

const char* kReport = R"(# Contoso Annual Report

Contoso makes widgets.

**Table 1: Results**

|        | 2019 | 2020 |
|--------|------|------|
| Sales  | 10.5 | 12.0 |
| Costs  | 4.0  | 5.5  |

Sales grew steadily.
)";

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("markdown documents split into title, passages and tables", "[ingest]") {
  const auto doc = parse_document(kReport, InputFormat::Markdown, "contoso");
  CHECK(doc.doc_id == "contoso");
  CHECK(doc.title == "Contoso Annual Report");
  REQUIRE(doc.passages.size() == 2);
  CHECK(doc.passages[0].text == "Contoso makes widgets.");
  CHECK(doc.passages[1].passage_id == "p1");
  REQUIRE(doc.tables.size() == 1);
  const auto& t = doc.tables[0];
  CHECK(t.caption == "Table 1: Results");
  CHECK(t.anchor == 1);
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 3);
  CHECK(t.marked_header_rows == 1);
  CHECK(t.at(1, 1).content == "10.5");
}

TEST_CASE("html tables keep spans and resolve covered cells", "[ingest]") {
  const char* html =
      "<table><tr><th></th><th colspan=\"2\">2019</th></tr>"
      "<tr><th></th><th>Q1</th><th>Q2</th></tr>"
      "<tr><td>Sales</td><td>1.5</td><td>2.5</td></tr></table>";
  auto t = parse_table(html, TableFormat::Html);
  REQUIRE(t.rows() == 3);
  REQUIRE(t.cols() == 3);
  REQUIRE(t.spans.size() == 1);
  CHECK(t.spans[0] == Span{0, 1, 1, 2});
  CHECK(t.at(0, 2).content.empty());
  CHECK(t.resolved(0, 2) == "2019");
  CHECK(t.anchor_of(0, 2) == CellCoord{0, 1});
  CHECK_NOTHROW(validate_table(t));
}

TEST_CASE("html serialization round-trips spans and content", "[ingest]") {
  auto t = parse_table(
      "<table><tr><td rowspan=\"2\">Retail</td><td>Sales</td><td>1.0</td></tr>"
      "<tr><td>Margin</td><td>0.2</td></tr></table>",
      TableFormat::Html);
  const auto again = parse_table(serialize_table(t, TableFormat::Html), TableFormat::Html);
  CHECK(again.spans == t.spans);
  REQUIRE(again.rows() == t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) CHECK(again.at(r, c).content == t.at(r, c).content);
  }
}

TEST_CASE("pipe tables round-trip and refuse spans", "[ingest]") {
  auto t = parse_table("| a | b\\|c |\n|---|---|\n| 1 | 2 |\n", TableFormat::Markdown);
  CHECK(t.at(0, 1).content == "b|c");
  const auto again = parse_table(serialize_table(t, TableFormat::Markdown), TableFormat::Markdown);
  CHECK(again.at(0, 1).content == "b|c");
  CHECK(again.at(1, 1).content == "2");
  t.spans.push_back({0, 0, 1, 2});
  CHECK(code_of([&] { serialize_table(t, TableFormat::Markdown); }) == ErrorCode::MalformedInput);
}

TEST_CASE("short rows are padded and reported", "[ingest]") {
  ParseReport report;
  const auto t = parse_table("| a | b | c |\n|---|---|---|\n| 1 |\n", TableFormat::Markdown, &report);
  CHECK(t.cols() == 3);
  REQUIRE(report.padded_rows.size() == 1);
  CHECK(report.padded_rows[0].added_cells == 2);
}

TEST_CASE("ingest errors carry their codes", "[ingest]") {
  CHECK(code_of([] { parse_document("   \n", InputFormat::Markdown); }) == ErrorCode::EmptyDocument);
  CHECK(code_of([] { parse_document("{not json", InputFormat::StructuredGrid); }) == ErrorCode::MalformedInput);
  CHECK(code_of([] { parse_document("text\n</table>\n", InputFormat::Markdown); }) == ErrorCode::MalformedInput);
  CHECK(code_of([] {
          parse_table("<table><tr><td>1</td></tr></table><table><tr><td>2</td></tr></table>", TableFormat::Html);
        }) == ErrorCode::MultipleTables);
  Table overlapping = grid_table("d", "t", "", {{"a", "b"}, {"1", "2"}});
  overlapping.spans = {{0, 0, 1, 2}, {0, 1, 2, 1}};
  CHECK(code_of([&] { validate_table(overlapping); }) == ErrorCode::MalformedInput);
}

TEST_CASE("header detection finds header rows then header columns", "[ingest]") {
  auto t = grid_table("d", "t", "", {{"", "2019", "2020"}, {"Sales", "10.5", "12"}, {"Costs", "4", "5.5"}});
  const auto ann = classify_headers(t);
  CHECK(t.category == TableCategory::Flat2D);
  CHECK(ann.size() == 5);
  CHECK(t.at(0, 1).is_header);
  CHECK(t.at(1, 0).is_header);
  CHECK_FALSE(t.at(1, 1).is_header);
}

TEST_CASE("two header tiers make a table hierarchical", "[ingest]") {
  auto t = grid_table("d", "t", "",
                      {{"", "2019", "", "2020", ""}, {"", "Q1", "Q2", "Q1", "Q2"}, {"Sales", "1", "2", "3", "4"}});
  t.spans = {{0, 1, 1, 2}, {0, 3, 1, 2}};
  const auto ann = classify_headers(t);
  CHECK(t.category == TableCategory::Hierarchical2D);
  auto tier_at = [&](std::size_t r, std::size_t c) {
    for (const auto& a : ann) {
      if (a.coordinate == CellCoord{r, c}) return a.tier;
    }
    return 0u;
  };
  CHECK(tier_at(0, 2) == 1);
  CHECK(tier_at(1, 2) == 2);
}

TEST_CASE("numeric-only grids fall back to a single header row", "[ingest]") {
  auto t = grid_table("d", "t", "", {{"1", "2"}, {"3", "4"}});
  CHECK(code_of([&] { classify_headers(t); }) == ErrorCode::HeaderDetectionAmbiguous);
  const auto ann = annotate_headers(t);
  CHECK(ann.size() == 2);
  CHECK(t.at(0, 0).is_header);
  CHECK_FALSE(t.at(1, 0).is_header);
}

TEST_CASE("structured-grid json round-trips documents", "[ingest]") {
  const auto doc = parse_document(kReport, InputFormat::Markdown, "contoso");
  const auto again = document_from_json(document_to_json(doc));
  CHECK(document_to_json(again) == document_to_json(doc));
  CHECK(again.tables[0].caption == doc.tables[0].caption);
}

TEST_CASE("corpus store round-trips through disk", "[ingest]") {
  TempDir dir("ingest-store");
  write_file(dir.path() / "in" / "b.md", kReport);
  write_file(dir.path() / "in" / "a.md", "# Other\n\nJust text.\n");
  write_file(dir.path() / "in" / "skip.txt", "ignored");
  const auto inputs = list_inputs(dir.path() / "in");
  REQUIRE(inputs.size() == 2);
  CHECK(inputs[0].filename() == "a.md");
  std::vector<Document> docs;
  for (const auto& p : inputs) docs.push_back(read_input_file(p));
  CHECK(docs[1].doc_id == "b");
  const auto corpus = build_corpus(docs);
  CHECK(corpus.cell_groups.size() == 4);
  save_corpus(corpus, dir.path() / "store");
  const auto loaded = load_corpus(dir.path() / "store");
  CHECK(loaded.cell_groups == corpus.cell_groups);
  CHECK(loaded.documents.size() == 2);
  CHECK(loaded.table_count() == 1);
  CHECK(code_of([&] { build_corpus({docs[0], docs[0]}); }) == ErrorCode::MalformedInput);
}

TEST_CASE("keys for passages, tables and cells", "[ingest]") {
  CHECK(passage_key("doc", "p3") == "doc/p3");
  CHECK(table_key("doc", "t0") == "doc/t0");
  CHECK(table_key_of_cell("doc/t0/4/2") == "doc/t0");
}
