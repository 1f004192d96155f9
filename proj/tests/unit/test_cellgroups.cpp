#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "satrag/cellgroups.hpp"
#include "satrag/error.hpp"

using namespace satrag;
using namespace satrag::testing;

namespace {

Document hierarchical_doc() {
  Document doc;
  doc.doc_id = "acme";
  doc.title = "Acme Annual Report";
  doc.entity = "Acme Corp";
  doc.passages.push_back({"p0", "acme", "Acme builds anvils for a living.", 0});
  auto t = grid_table("acme", "t0", "Segment results",
                      {{"", "", "2019", "2020"},
                       {"Retail", "Sales", "1.5", "2.5"},
                       {"", "Margin", "0.3", "0.4"},
                       {"Wholesale", "Sales", "7", ""}});
  t.spans = {{1, 0, 2, 1}};
  doc.tables.push_back(t);
  return doc;
}

}  // namespace

TEST_CASE("every non-empty data cell becomes one group", "[cellgroups]") {
  auto doc = hierarchical_doc();
  const auto groups = decompose_document(doc);
  // Five numbers; the blank 2020 wholesale cell is skipped.
  REQUIRE(groups.size() == 5);
  CHECK(groups[0].cell_id == "acme/t0/1/2");
  CHECK(groups[0].value == "1.5");
  CHECK(groups[0].table_caption == "Segment results");
  CHECK(groups[0].doc_meta.entity == "Acme Corp");
  CHECK(groups.back().cell_id == "acme/t0/3/2");
}

TEST_CASE("header paths list column headers then row headers by tier", "[cellgroups]") {
  auto doc = hierarchical_doc();
  const auto groups = decompose_document(doc);
  // Margin 2020 sits under the Retail span.
  const auto& g = groups[3];
  REQUIRE(g.cell_id == "acme/t0/2/3");
  REQUIRE(g.header_path.size() == 3);
  CHECK(g.header_path[0].label == "2020");
  CHECK(g.header_path[0].header_type == HeaderType::ColumnHeader);
  CHECK(g.header_path[1].label == "Retail");
  CHECK(g.header_path[1].tier == 1);
  CHECK(g.header_path[2].label == "Margin");
  CHECK(g.header_path[2].tier == 2);
}

TEST_CASE("header coordinates are not data cells", "[cellgroups]") {
  auto doc = hierarchical_doc();
  auto& t = doc.tables[0];
  const auto ann = annotate_headers(t);
  try {
    header_path(t, ann, {0, 2});
    FAIL("expected NotADataCell");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotADataCell);
  }
}

TEST_CASE("global metadata is bounded by the context budget", "[cellgroups]") {
  auto doc = hierarchical_doc();
  const auto meta = extract_global_metadata(doc, 10);
  CHECK(meta.doc_id == "acme");
  CHECK(meta.title == "Acme Annual Report");
  CHECK(meta.context_snippet.size() <= 10);
  CHECK(extract_global_metadata(doc).context_snippet.find("anvils") != std::string::npos);
}

TEST_CASE("cell groups round-trip through jsonl", "[cellgroups]") {
  auto doc = hierarchical_doc();
  const auto groups = decompose_document(doc);
  CHECK(cell_groups_from_jsonl(cell_groups_to_jsonl(groups)) == groups);
  CHECK(cell_group_from_json(cell_group_to_json(groups[2])) == groups[2]);
  CHECK(make_cell_id("d", "t", 3, 4) == "d/t/3/4");
}

TEST_CASE("the toy corpus decomposes into exactly its generated cells", "[cellgroups]") {
  const auto idx = build_toy_index();
  std::set<std::string> expected;
  for (const auto& c : idx.toy.cells) expected.insert(c.cell_id);
  std::set<std::string> got;
  for (const auto& g : idx.corpus.cell_groups) got.insert(g.cell_id);
  CHECK(got == expected);
  CHECK(idx.corpus.cell_groups.size() == expected.size());
}
