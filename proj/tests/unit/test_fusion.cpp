#include <catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "satrag/error.hpp"
#include "satrag/fusion.hpp"

using namespace satrag;
using namespace satrag::testing;

namespace {

EvidenceTuple tuple_for(const SATGraph& g, const std::string& cell) {
  const auto& leaf = g.leaf(leaves_by_cell(g).at(cell));
  EvidenceTuple t;
  t.key = leaf.key;
  t.leaf = leaf.id;
  t.value = leaf.value;
  t.cell_id = cell;
  t.doc_id = leaf.provenance.doc_id;
  t.source_table = leaf.provenance.table_id;
  return t;
}

class FixedCompletion final : public CompletionProvider {
 public:
  explicit FixedCompletion(std::string text) : text_(std::move(text)) {}
  std::string complete(const std::string&) override { return text_; }

 private:
  std::string text_;
};

}  // namespace

TEST_CASE("facts linearize with the subject, attribute, value and period", "[fusion]") {
  const auto idx = build_toy_index();
  const auto* c = find_toy_cell(idx.toy, "aldermont", "Revenue", 2019, 2);
  REQUIRE(c);
  const auto f = linearize(idx.graph, tuple_for(idx.graph, c->cell_id));
  CHECK(f.statement == "Aldermont Holdings's Revenue is " + c->value + " at Q2 2019");
}

TEST_CASE("passages for a fact come only from its own document", "[fusion]") {
  const auto idx = build_toy_index();
  MockEmbedder mock;
  CachingEmbedder embedder(mock);
  std::mt19937_64 rng(17);
  std::vector<std::string> cells;
  for (const auto& c : idx.toy.cells) cells.push_back(c.cell_id);
  for (int i = 0; i < 200; ++i) {
    const auto t = tuple_for(idx.graph, cells[rng() % cells.size()]);
    const auto k = 1 + rng() % 10;
    const auto got = fetch_context(linearize(idx.graph, t), idx.corpus, embedder, k);
    CHECK(got.size() == std::min<std::size_t>(k, idx.corpus.find_document(t.doc_id)->passages.size()));
    for (const auto& p : got) {
      CHECK(p.doc_id == t.doc_id);
      CHECK(p.key.rfind(t.doc_id + "/", 0) == 0);
    }
    for (std::size_t j = 1; j < got.size(); ++j) CHECK(got[j - 1].score >= got[j].score);
  }
}

TEST_CASE("year-bearing passages bridge to facts of that year", "[fusion]") {
  const auto idx = build_toy_index();
  MockEmbedder embedder;
  const auto* c = find_toy_cell(idx.toy, "dunmore", "Revenue", 2018);
  const auto got = fetch_context(linearize(idx.graph, tuple_for(idx.graph, c->cell_id)), idx.corpus, embedder, 2);
  bool found = false;
  for (const auto& f : idx.toy.passage_facts) {
    if (f.doc_id != "dunmore" || f.year != 2018) continue;
    for (const auto& p : got) found = found || p.key == passage_key(f.doc_id, f.passage_id);
  }
  CHECK(found);
}

TEST_CASE("packages fetch passages only for text-dependent queries with fusion on", "[fusion]") {
  const auto idx = build_toy_index();
  MockEmbedder embedder;
  const auto* c = find_toy_cell(idx.toy, "everton", "Net income", 2017);
  const std::vector<EvidenceTuple> tuples{tuple_for(idx.graph, c->cell_id)};
  RetrievalConfig on;
  RetrievalConfig off;
  off.enable_fusion = false;
  FusionConfig fcfg;
  CHECK(build_package(idx.graph, idx.corpus, tuples, {"q", 0}, on, fcfg, embedder).passages.empty());
  CHECK(build_package(idx.graph, idx.corpus, tuples, {"q", 1}, off, fcfg, embedder).passages.empty());
  const auto pkg = build_package(idx.graph, idx.corpus, tuples, {"q", 1}, on, fcfg, embedder);
  CHECK(pkg.facts.size() == 1);
  CHECK(pkg.passages.size() == fcfg.passages_per_fact);

  // Two facts from one document share passages without repeats.
  const auto* d = find_toy_cell(idx.toy, "everton", "Net income", 2018);
  const auto two = build_package(idx.graph, idx.corpus, {tuples[0], tuple_for(idx.graph, d->cell_id)}, {"q", 1}, on,
                                 fcfg, embedder);
  std::set<std::string> keys;
  for (const auto& p : two.passages) CHECK(keys.insert(p.key).second);
}

TEST_CASE("prompts hold facts, passages and the question in order", "[fusion]") {
  EvidencePackage pkg;
  pkg.query = {"What happened?", 1};
  LinearizedFact f;
  f.statement = "A's B is 1 at 2019";
  pkg.facts.push_back(f);
  pkg.passages.push_back({"d/p0", "d", "First passage.", 0.5});
  pkg.passages.push_back({"d/p1", "d", "Second passage.", 0.4});
  const auto prompt = assemble_prompt(pkg);
  const auto facts = prompt.find("Facts:\n[F1] A's B is 1 at 2019");
  const auto passages = prompt.find("Passages:\n[P1] First passage.\n[P2] Second passage.");
  const auto question = prompt.find("Question: What happened?");
  REQUIRE(facts != std::string::npos);
  REQUIRE(passages != std::string::npos);
  REQUIRE(question != std::string::npos);
  CHECK(facts < passages);
  CHECK(passages < question);
}

TEST_CASE("over budget, passages are cut from the end and facts never are", "[fusion]") {
  EvidencePackage pkg;
  pkg.query = {"q", 1};
  LinearizedFact f;
  f.statement = "A's B is 1 at 2019";
  pkg.facts.push_back(f);
  pkg.passages.push_back({"d/p0", "d", std::string(200, 'x'), 0.5});
  pkg.passages.push_back({"d/p1", "d", std::string(200, 'y'), 0.4});
  const auto full = assemble_prompt(pkg, 100000);
  const auto cut = assemble_prompt(pkg, full.size() - 50);
  CHECK(cut.size() <= full.size() - 50);
  CHECK(cut.find(kTruncationMarker) != std::string::npos);
  CHECK(cut.find(std::string(200, 'x')) != std::string::npos);
  const auto tiny = assemble_prompt(pkg, 10);
  CHECK(tiny.find("[F1] A's B is 1 at 2019") != std::string::npos);
  CHECK(tiny.find("Passages:") == std::string::npos);
  CHECK_THROWS_AS(assemble_prompt(EvidencePackage{}), Error);
}

TEST_CASE("citations map back to cells and passages", "[fusion]") {
  EvidencePackage pkg;
  LinearizedFact f;
  f.statement = "s";
  f.source.cell_id = "d/t/1/1";
  pkg.facts.push_back(f);
  pkg.passages.push_back({"d/p3", "d", "text", 0.1});
  FixedCompletion llm("Per [F1] and [P1], also [F7].");
  const auto a = generate_answer("prompt", pkg, llm);
  CHECK(a.cited_cell_ids == std::set<std::string>{"d/t/1/1"});
  CHECK(a.cited_passage_ids == std::set<std::string>{"d/p3"});
  CHECK(a.diagnostics.size() == 1);
  FixedCompletion blank("   ");
  try {
    generate_answer("prompt", pkg, blank);
    FAIL("expected EmptyCompletion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCompletion);
  }
}

TEST_CASE("chunk packages carry retrieved chunks as passages", "[fusion]") {
  const auto idx = build_toy_index();
  const std::vector<ScoredChunk> got{{0, 0.9}, {1, 0.8}};
  const auto pkg = build_chunk_package(idx.chunks, got, {"q", 0});
  CHECK(pkg.facts.empty());
  REQUIRE(pkg.passages.size() == 2);
  CHECK(pkg.passages[0].key == idx.chunks[0].chunk_id);
}
