#include <catch_amalgamated.hpp>

#include <algorithm>

#include "fixtures.hpp"
#include "satrag/error.hpp"
#include "satrag/synthetic.hpp"

using namespace satrag;
using namespace satrag::testing;

TEST_CASE("the toy corpus has five reports of three tables", "[synthetic]") {
  const auto toy = make_toy_corpus();
  CHECK(toy.documents.size() == 5);
  std::size_t tables = 0;
  for (const auto& d : toy.documents) {
    tables += d.tables.size();
    CHECK_FALSE(d.entity.empty());
  }
  CHECK(tables == 15);
  CHECK(toy.cells.size() == 330);
  std::set<std::string> values;
  for (const auto& c : toy.cells) values.insert(c.value);
  CHECK(values.size() == toy.cells.size());
  CHECK_FALSE(toy.passage_facts.empty());
}

TEST_CASE("toy generation is deterministic in its seed", "[synthetic]") {
  const auto a = make_toy_corpus(5);
  const auto b = make_toy_corpus(5);
  const auto c = make_toy_corpus(6);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].value == b.cells[i].value);
  bool differs = false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) differs = differs || a.cells[i].value != c.cells[i].value;
  CHECK(differs);
}

TEST_CASE("toy cells are found by document, attribute and period", "[synthetic]") {
  const auto toy = make_toy_corpus();
  const auto* annual = find_toy_cell(toy, "aldermont", "Revenue", 2019);
  REQUIRE(annual);
  CHECK(annual->quarter == 0);
  CHECK(annual->period == "2019");
  const auto* quarter = find_toy_cell(toy, "aldermont", "Revenue", 2019, 2);
  REQUIRE(quarter);
  CHECK(quarter->period == "Q2 2019");
  CHECK(find_toy_cell(toy, "aldermont", "Revenue", 1999) == nullptr);
}

TEST_CASE("the ablation benchmark mixes lookups, comparisons and text questions", "[synthetic]") {
  const auto toy = make_toy_corpus();
  const auto items = make_ablation_benchmark(toy);
  REQUIRE(items.size() == 50);
  std::size_t f0 = 0;
  std::size_t f1 = 0;
  std::set<std::string> ids;
  for (const auto& q : items) {
    CHECK(ids.insert(q.query_id).second);
    CHECK_FALSE(q.gold_values.empty());
    CHECK_FALSE(q.gold_cell_ids.empty());
    if (q.flag == 0) ++f0;
    else ++f1;
    if (q.flag == 1) CHECK_FALSE(q.gold_passage_ids.empty());
  }
  CHECK(f0 == 35);
  CHECK(f1 == 15);
  CHECK(make_ablation_benchmark(toy, 7, 3, 2, 1).size() == 6);
}

TEST_CASE("neighbor fixtures name adjacent periods of the same series", "[synthetic]") {
  const auto toy = make_toy_corpus();
  const auto fixtures = make_sne_fixtures(toy);
  CHECK(fixtures.size() == 190);
  std::map<std::string, const ToyCell*> by_id;
  for (const auto& c : toy.cells) by_id[c.cell_id] = &c;
  for (const auto& f : fixtures) {
    REQUIRE(f.neighbor_cells.size() == 2);
    const auto* focal = by_id.at(f.focal_cell);
    for (const auto& n : f.neighbor_cells) {
      const auto* c = by_id.at(n);
      CHECK(c->doc_id == focal->doc_id);
      CHECK(c->attribute == focal->attribute);
      CHECK((c->quarter == 0) == (focal->quarter == 0));
    }
  }
}

TEST_CASE("random queries are reproducible", "[synthetic]") {
  const auto idx = build_toy_index();
  const auto a = make_random_queries(idx.graph, 30, 3);
  const auto b = make_random_queries(idx.graph, 30, 3);
  REQUIRE(a.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].text == b[i].text);
}

TEST_CASE("toy inputs are written one grid file per report", "[synthetic]") {
  const auto toy = make_toy_corpus();
  TempDir dir("toy");
  write_toy_inputs(toy, dir.path());
  const auto files = list_inputs(dir.path());
  CHECK(files.size() == 5);
  const auto doc = read_input_file(files.front());
  CHECK(doc.tables.size() == 3);
}
