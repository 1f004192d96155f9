#include <catch_amalgamated.hpp>

#include <algorithm>

#include "fixtures.hpp"
#include "satrag/dataset_gen.hpp"
#include "satrag/error.hpp"
#include "satrag/text.hpp"

using namespace satrag;
using namespace satrag::testing;

namespace {

Corpus toy_corpus() { return build_corpus(make_toy_corpus().documents); }

// Answers every prompt with the same text.
class FixedCompletion final : public CompletionProvider {
 public:
  explicit FixedCompletion(std::string text) : text_(std::move(text)) {}
  std::string complete(const std::string&) override { return text_; }

 private:
  std::string text_;
};

// Small grid where the same date occurs in exactly three cells.
std::vector<CellGroup> three_same_date_cells() {
  Document doc;
  doc.doc_id = "d";
  doc.entity = "Acme";
  doc.passages.push_back({"p0", "d", "Intro.", 0});
  doc.tables.push_back(grid_table("d", "t0", "Results", {{"", "2019", "2020"}, {"A", "1", "2"}, {"B", "3", "4"}, {"C", "5", "6"}}));
  return decompose_document(doc);
}

}  // namespace

TEST_CASE("seeded shuffles are reproducible permutations", "[dataset_gen]") {
  std::vector<std::size_t> a(50), b(50);
  for (std::size_t i = 0; i < 50; ++i) a[i] = b[i] = i;
  seeded_shuffle(a, 9);
  seeded_shuffle(b, 9);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
  auto c = sorted;
  seeded_shuffle(c, 10);
  CHECK(c != a);
}

TEST_CASE("association keys group by date, subject and entity", "[dataset_gen]") {
  const auto corpus = toy_corpus();
  DefaultSubjectExtractor subjects;
  const auto& quarterly = *std::find_if(corpus.cell_groups.begin(), corpus.cell_groups.end(),
                                        [](const CellGroup& g) { return g.table_id == "quarterly"; });
  CHECK(association_key(quarterly, Association::SameDate, subjects).value().find("-Q") != std::string::npos);
  CHECK(association_key(quarterly, Association::SameEntity, subjects) == text::canonical_label(quarterly.doc_meta.entity));
  CHECK(association_key(quarterly, Association::SameSubject, subjects) == text::canonical_label(quarterly.doc_meta.entity));
  CHECK(association_key(quarterly, Association::Random, subjects) == std::string());
  auto orphan = quarterly;
  orphan.doc_meta.entity.clear();
  CHECK_FALSE(association_key(orphan, Association::SameEntity, subjects));
  CHECK(parse_association("same-date") == Association::SameDate);
  CHECK(to_string(Association::SameEntity) == "same-entity");
  CHECK_THROWS_AS(parse_association("nearby"), Error);
}

TEST_CASE("pairs share their association key", "[dataset_gen]") {
  const auto corpus = toy_corpus();
  DefaultSubjectExtractor subjects;
  for (auto a : {Association::SameDate, Association::SameSubject, Association::SameEntity}) {
    const auto pairs = pair_fields(corpus.cell_groups, a, 25, 5);
    CHECK(pairs.size() == 25);
    for (const auto& p : pairs) {
      REQUIRE(p.cells.size() == 2);
      CHECK(p.cells[0].cell_id != p.cells[1].cell_id);
      CHECK(association_key(p.cells[0], a, subjects) == association_key(p.cells[1], a, subjects));
      CHECK(p.association == a);
    }
  }
}

TEST_CASE("pairing never touches an embedder", "[dataset_gen]") {
  const auto corpus = toy_corpus();
  const auto before = embedding_calls_in_process();
  for (auto a : {Association::SameDate, Association::SameSubject, Association::SameEntity, Association::Random}) {
    pair_fields(corpus.cell_groups, a, 30, 1);
    draw_pairs(corpus.cell_groups, a, 1000, 2, 3);
  }
  CHECK(embedding_calls_in_process() == before);
}

TEST_CASE("pairing is deterministic for a seed", "[dataset_gen]") {
  const auto corpus = toy_corpus();
  auto ids = [](const std::vector<CandidatePair>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) {
      for (const auto& c : p.cells) out.push_back(c.cell_id);
    }
    return out;
  };
  CHECK(ids(pair_fields(corpus.cell_groups, Association::Random, 40, 3)) ==
        ids(pair_fields(corpus.cell_groups, Association::Random, 40, 3)));
  CHECK(ids(pair_fields(corpus.cell_groups, Association::Random, 40, 3)) !=
        ids(pair_fields(corpus.cell_groups, Association::Random, 40, 4)));
}

TEST_CASE("a three-cell date bucket yields one triple", "[dataset_gen]") {
  const auto groups = three_same_date_cells();
  REQUIRE(groups.size() == 6);
  const auto triples = draw_pairs(groups, Association::SameDate, 10, 1, 3);
  REQUIRE(triples.size() == 2);
  for (const auto& t : triples) {
    CHECK(t.cells.size() == 3);
    std::set<std::string> cols;
    for (const auto& c : t.cells) cols.insert(c.header_path.front().label);
    CHECK(cols.size() == 1);
  }
  try {
    pair_fields(groups, Association::SameDate, 3, 1, 3);
    FAIL("expected InsufficientCandidates");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientCandidates);
  }
}

TEST_CASE("entities come from the extraction prompt", "[dataset_gen]") {
  Document doc;
  doc.doc_id = "d";
  doc.title = "Globex Annual Report";
  doc.passages.push_back({"p0", "d", "Globex sells things.", 0});
  FixedCompletion good("Sure: {\"entity\": \"Globex\", \"type\": \"Company\"}");
  CHECK(enrich_entity(doc, good) == "Globex");
  FixedCompletion bad("no json here");
  try {
    enrich_entity(doc, bad);
    FAIL("expected UnparseableEntity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnparseableEntity);
  }

  Corpus corpus = build_corpus({doc});
  ScriptedCompletion scripted;
  CHECK(enrich_corpus_entities(corpus, scripted) == 1);
  CHECK(corpus.documents[0].entity == "Globex Annual Report");
}

TEST_CASE("validation accepts, rejects or fails to parse", "[dataset_gen]") {
  const auto corpus = toy_corpus();
  const auto pair = pair_fields(corpus.cell_groups, Association::SameEntity, 1, 2).front();
  const auto context = pair_context(pair);
  CHECK(context.find("[1] ") != std::string::npos);
  CHECK(context.find(" = " + pair.cells[1].value) != std::string::npos);

  ScriptedCompletion accept;
  const auto ok = validate_pair(pair, accept);
  REQUIRE(ok.draft);
  CHECK_FALSE(ok.draft->question.empty());

  ScriptedCompletion reject(ScriptedCompletion::Mode::RejectAll);
  const auto no = validate_pair(pair, reject);
  CHECK_FALSE(no.draft);
  CHECK(no.reject_reason == "scripted rejection");

  FixedCompletion garbage("{\"question\": 5");
  try {
    validate_pair(pair, garbage);
    FAIL("expected UnparseableValidation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnparseableValidation);
  }
}

TEST_CASE("emission dedupes drafts and adds nearby passages for f=1", "[dataset_gen]") {
  const auto corpus = toy_corpus();
  const auto pair = pair_fields(corpus.cell_groups, Association::SameDate, 1, 8).front();
  QAPairDraft d{"Q?", "A.", pair};
  auto swapped = d;
  std::reverse(swapped.source.cells.begin(), swapped.source.cells.end());
  const auto out = emit_qa({d, swapped, QAPairDraft{"Other?", "B.", pair}}, corpus, 2);
  REQUIRE(out.f0.size() == 2);
  REQUIRE(out.f1.size() == 2);
  CHECK(out.f0[0].query_id == "q0001-f0");
  CHECK(out.f1[0].query_id == "q0001-f1");
  CHECK(out.f0[0].flag == 0);
  CHECK(out.f0[0].gold_passage_ids.empty());
  CHECK_FALSE(out.f1[0].gold_passage_ids.empty());
  CHECK(out.f0[0].gold_values.size() == 2);
}

TEST_CASE("nearest passages alternate around the table anchor", "[dataset_gen]") {
  Document doc;
  doc.doc_id = "d";
  for (std::size_t i = 0; i < 6; ++i) doc.passages.push_back({"p" + std::to_string(i), "d", "x", i});
  Table t;
  t.anchor = 3;  // after p0..p2
  CHECK(nearest_passages(doc, t, 4) == std::vector<std::string>{"d/p2", "d/p3", "d/p1", "d/p4"});
  t.anchor = 0;
  CHECK(nearest_passages(doc, t, 2) == std::vector<std::string>{"d/p0", "d/p1"});
  t.anchor = 6;
  CHECK(nearest_passages(doc, t, 1) == std::vector<std::string>{"d/p5"});
}

TEST_CASE("generation is reproducible and reports its counts", "[dataset_gen]") {
  GenConfig cfg;
  cfg.n_pairs = 10;
  cfg.associations = {Association::SameDate, Association::SameEntity, Association::Random};
  TempDir dir("gen");
  std::string first;
  for (int run = 0; run < 2; ++run) {
    auto corpus = toy_corpus();
    ScriptedCompletion llm;
    const auto result = generate_qa(corpus, llm, cfg);
    CHECK(result.report.pairs_drawn == 30);
    CHECK(result.report.accepted + result.report.duplicates == 30);
    const auto out = dir.path() / std::to_string(run);
    write_gen_outputs(result, out);
    const auto bytes = read_file(out / "qa_f0.jsonl") + read_file(out / "qa_f1.jsonl") + read_file(out / "gen_report.json");
    if (run == 0) first = bytes;
    else CHECK(bytes == first);
  }

  auto corpus = toy_corpus();
  ScriptedCompletion rejecting(ScriptedCompletion::Mode::RejectAll);
  const auto none = generate_qa(corpus, rejecting, cfg);
  CHECK(none.report.accepted == 0);
  CHECK(none.report.rejected == 30);
  CHECK(none.report.rejection_reasons.at("scripted rejection") == 30);

  GenConfig greedy = cfg;
  greedy.n_pairs = 100000;
  greedy.associations = {Association::SameEntity};
  auto corpus2 = toy_corpus();
  ScriptedCompletion llm;
  const auto partial = generate_qa(corpus2, llm, greedy);
  CHECK_FALSE(partial.report.notes.empty());
}

TEST_CASE("paraphrasing removes verbatim values from gold passages", "[dataset_gen]") {
  auto corpus = toy_corpus();
  const auto toy = make_toy_corpus();
  const auto& fact = toy.passage_facts.front();
  QaItem item;
  item.flag = 1;
  item.gold_passage_ids = {passage_key(fact.doc_id, fact.passage_id)};
  // A cell whose value is copied into the passage.
  const auto& cg = corpus.cell_groups.front();
  item.gold_cell_ids = {cg.cell_id};
  for (auto& d : corpus.documents) {
    if (d.doc_id != fact.doc_id) continue;
    for (auto& p : d.passages) {
      if (p.passage_id == fact.passage_id) p.text += " Revenue was " + cg.value + ".";
    }
  }
  ScriptedCompletion llm;
  CHECK(paraphrase_value_leaks(corpus, {item}, llm) == 1);
  const auto* doc = corpus.find_document(fact.doc_id);
  for (const auto& p : doc->passages) {
    if (p.passage_id == fact.passage_id) CHECK(p.text.find(cg.value) == std::string::npos);
  }
}
