#include <catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "metric_oracle.hpp"
#include "satrag/error.hpp"
#include "satrag/eval.hpp"

using namespace satrag;
using namespace satrag::testing;

namespace {

bool same(const Fraction& f, const Ratio& r) { return f == Fraction{r.num, r.den}; }

}  // namespace

TEST_CASE("ranked metrics match hand-computed fractions", "[eval]") {
  const std::vector<std::string> ranked{"a", "b", "c", "d", "e"};
  const std::set<std::string> gold{"b", "d", "x"};
  CHECK(hit_at_k(ranked, gold, 1) == Fraction{0, 1});
  CHECK(hit_at_k(ranked, gold, 2) == Fraction{1, 1});
  CHECK(recall_at_k(ranked, gold, 5) == Fraction{2, 3});
  CHECK(precision_at_k(ranked, gold, 5) == Fraction{2, 5});
  // Precision divides by k even when fewer units came back.
  CHECK(precision_at_k({"b"}, gold, 10) == Fraction{1, 10});
  CHECK_THROWS_AS(hit_at_k(ranked, {}, 1), Error);
}

TEST_CASE("cell metrics divide by the larger of k and attributed cells", "[eval]") {
  const auto m = cell_metrics({{"r1", "r2", "r3", "r4"}, {}}, {"r2", "r9"}, 1);
  CHECK(m.hit == Fraction{1, 1});
  CHECK(m.recall == Fraction{1, 2});
  CHECK(m.precision == Fraction{1, 4});
  const auto n = cell_metrics({{"c1"}, {"c2"}}, {"c2"}, 5);
  CHECK(n.precision == Fraction{1, 5});
}

TEST_CASE("library metrics agree with the reference formulas on random cases", "[eval]") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> ranked;
    for (auto n = rng() % 12; n > 0; --n) ranked.push_back("u" + std::to_string(rng() % 15));
    std::set<std::string> gold;
    for (auto n = 1 + rng() % 4; n > 0; --n) gold.insert("u" + std::to_string(rng() % 15));
    std::vector<std::vector<std::string>> units;
    for (auto n = rng() % 8; n > 0; --n) {
      std::vector<std::string> u;
      for (auto m = rng() % 4; m > 0; --m) u.push_back("u" + std::to_string(rng() % 15));
      units.push_back(u);
    }
    for (std::size_t k = 1; k <= 12; ++k) {
      CHECK(same(hit_at_k(ranked, gold, k), ref_hit(ranked, gold, k)));
      CHECK(same(recall_at_k(ranked, gold, k), ref_recall(ranked, gold, k)));
      CHECK(same(precision_at_k(ranked, gold, k), ref_precision(ranked, gold, k)));
      const auto c = cell_metrics(units, gold, k);
      const auto rc = ref_cell(units, gold, k);
      CHECK(same(c.hit, rc.hit));
      CHECK(same(c.recall, rc.recall));
      CHECK(same(c.precision, rc.precision));
    }
  }
}

TEST_CASE("value recall normalizes numbers and matches text case-insensitively", "[eval]") {
  CHECK(exact_value_recall("Revenue was $1,234.0 and (5) in ACME", {"1234", "-5", "acme"}) == Fraction{3, 3});
  CHECK(exact_value_recall("Revenue was 12.5%", {"12.5", "13"}) == Fraction{1, 2});
  CHECK(exact_value_recall("4,206 employees", {"4206"}) == Fraction{1, 1});
  CHECK(exact_value_recall("nothing here", {"42"}) == Fraction{0, 1});
  CHECK_THROWS_AS(exact_value_recall("x", {}), Error);
}

TEST_CASE("claims split on sentences and drop markers", "[eval]") {
  const auto claims = split_claims("ECHO:\n[F1] Revenue is 926.5 at 2019. Costs fell! [P2] Why?\n");
  REQUIRE(claims.size() == 3);
  CHECK(claims[0] == "Revenue is 926.5 at 2019.");
  CHECK(claims[2] == "Why?");
  MockEmbedder e;
  const auto s = claim_alignment("Revenue is 5. Sky is blue.", "Revenue is 5.", e);
  CHECK(s.precision == Fraction{1, 2});
  CHECK(s.recall == Fraction{1, 1});
}

TEST_CASE("qa files round-trip through jsonl", "[eval]") {
  QaItem item;
  item.query_id = "q1";
  item.question = "What?";
  item.flag = 1;
  item.gold_cell_ids = {"d/t/1/1"};
  item.gold_passage_ids = {"d/p1"};
  item.gold_answer = "It.";
  item.gold_values = {"5"};
  const auto again = qa_items_from_jsonl(qa_items_to_jsonl({item, item}));
  REQUIRE(again.size() == 2);
  CHECK(again[1] == item);
  CHECK(gold_units(item) == std::set<std::string>{"d/t", "d/p1"});
}

TEST_CASE("cutoffs must be positive and strictly increasing", "[eval]") {
  CHECK_NOTHROW(check_cutoffs({1, 3, 5, 10}));
  CHECK_THROWS_AS(check_cutoffs({0, 3}), Error);
  CHECK_THROWS_AS(check_cutoffs({3, 3}), Error);
  CHECK_THROWS_AS(check_cutoffs({}), Error);
}

TEST_CASE("ablation settings and their file names", "[eval]") {
  const auto cfgs = ablation_configs(EvalConfig{});
  REQUIRE(cfgs.size() == 4);
  CHECK(cfgs[0].label == "full");
  CHECK(cfgs[1].retrieval.mode == RetrievalMode::ChunkBaseline);
  CHECK_FALSE(cfgs[2].retrieval.enable_sne);
  CHECK_FALSE(cfgs[3].retrieval.enable_fusion);
  CHECK(label_slug("w/o SNE") == "wo-sne");
  CHECK(label_slug("full") == "full");
}

TEST_CASE("a toy evaluation reports every metric row per flag", "[eval]") {
  const auto idx = build_toy_index();
  MockEmbedder mock;
  CachingEmbedder embedder(mock);
  LexiconAnalyzer analyzer(idx.graph);
  EvidenceEchoCompletion echo;
  const EvalContext ctx{idx.graph, idx.corpus, idx.chunks, embedder, analyzer, &echo};
  const auto items = make_ablation_benchmark(idx.toy, 7, 6, 4, 4);
  const auto out = run_eval(ctx, items, EvalConfig{});
  REQUIRE(out.reports.size() == 2);
  CHECK(out.outcomes.size() == items.size());
  const auto& f0 = out.reports[0];
  CHECK(f0.flag == 0);
  CHECK(f0.n_queries == 10);
  CHECK(f0.per_k.size() == 4);
  CHECK(f0.per_k[0].k == 1);
  CHECK(f0.per_k[0].hit_rate == Catch::Approx(1.0));
  CHECK(f0.value_accuracy_recall > 0.9);
  CHECK(out.reports[1].per_k.back().k == 40);
  const auto table = f0.to_table();
  for (const char* row : {"\nHR ", "\nR ", "\nP ", "\nC-HR ", "\nC-R ", "\nC-P "}) CHECK(table.find(row) != std::string::npos);
  CHECK(f0.to_json().at("label") == "full");

  // Hit and recall never fall as k grows.
  for (const auto& r : out.reports) {
    for (std::size_t i = 1; i < r.per_k.size(); ++i) {
      CHECK(r.per_k[i].hit_rate >= r.per_k[i - 1].hit_rate);
      CHECK(r.per_k[i].recall >= r.per_k[i - 1].recall);
      CHECK(r.per_k[i].cell_recall >= r.per_k[i - 1].cell_recall);
    }
  }
}

TEST_CASE("queries that cannot be answered count as zero", "[eval]") {
  const auto idx = build_toy_index();
  MockEmbedder embedder;
  LexiconAnalyzer analyzer(idx.graph);
  FailingCompletion failing;
  const EvalContext ctx{idx.graph, idx.corpus, idx.chunks, embedder, analyzer, &failing};
  QaItem item;
  item.query_id = "x";
  item.question = "What was Aldermont Holdings's Revenue in 2019?";
  item.gold_cell_ids = {find_toy_cell(idx.toy, "aldermont", "Revenue", 2019)->cell_id};
  item.gold_values = {"1"};
  const auto o = evaluate_query(ctx, item, EvalConfig{});
  CHECK_FALSE(o.failure.empty());
  const auto r = aggregate({item}, {o}, 0, {1, 3}, "full");
  CHECK(r.n_failures == 1);
  CHECK(r.value_accuracy_recall == 0.0);
}
