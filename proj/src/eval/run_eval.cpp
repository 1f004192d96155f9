#include <algorithm>
#include <cstdio>
#include <map>

#include <spdlog/spdlog.h>

#include "satrag/error.hpp"
#include "satrag/eval.hpp"
#include "satrag/text.hpp"

namespace satrag {

void check_cutoffs(const std::vector<std::size_t>& cutoffs) {
  if (cutoffs.empty()) throw Error(ErrorCode::ConfigError, "at least one cutoff is required");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] == 0) throw Error(ErrorCode::ConfigError, "cutoffs must be positive");
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) {
      throw Error(ErrorCode::ConfigError, "cutoffs must be strictly increasing");
    }
  }
}

std::set<std::string> gold_units(const QaItem& item) {
  std::set<std::string> out;
  for (const auto& c : item.gold_cell_ids) out.insert(table_key_of_cell(c));
  out.insert(item.gold_passage_ids.begin(), item.gold_passage_ids.end());
  return out;
}

nlohmann::json QueryOutcome::to_json() const {
  nlohmann::json j = {{"query_id", query_id},
                      {"flag", flag},
                      {"units", units},
                      {"cell_units", cell_units},
                      {"natural_units", natural_units},
                      {"natural_cell_units", natural_cell_units},
                      {"answer", answer}};
  if (value_recall) j["value_recall"] = value_recall->value();
  if (claims) {
    j["claim_precision"] = claims->precision.value();
    j["claim_recall"] = claims->recall.value();
  }
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

namespace {

const std::vector<std::size_t>& cutoffs_for(const EvalConfig& cfg, int flag) {
  return flag == 1 ? cfg.cutoffs_f1 : cfg.cutoffs_f0;
}

void push_unit(std::vector<std::string>& units, std::set<std::string>& seen, std::string unit) {
  if (seen.insert(unit).second) units.push_back(std::move(unit));
}

}  // namespace

QueryOutcome evaluate_query(const EvalContext& ctx, const QaItem& item, const EvalConfig& cfg) {
  QueryOutcome out;
  out.query_id = item.query_id;
  out.flag = item.flag;
  try {
    if (gold_units(item).empty()) throw Error(ErrorCode::EmptyGold, "no gold evidence");
    const auto& cutoffs = cutoffs_for(cfg, item.flag);
    const std::size_t natural_k = cfg.retrieval.top_k;
    RetrievalConfig rc = cfg.retrieval;
    rc.top_k = std::max(natural_k, cutoffs.empty() ? std::size_t{1} : cutoffs.back());

    const Query q{item.question, item.flag};
    const auto result = retrieve({ctx.graph, ctx.chunks, ctx.embedder, ctx.analyzer}, q, rc);

    std::set<std::string> seen;
    EvidencePackage pkg;
    if (rc.mode == RetrievalMode::SatGraph) {
      const bool with_text = item.flag == 1 && rc.enable_fusion;
      for (std::size_t i = 0; i < result.tuples.size(); ++i) {
        const auto& t = result.tuples[i];
        push_unit(out.units, seen, table_key(t.doc_id, t.source_table));
        if (with_text) {
          for (const auto& p : fetch_context(linearize(ctx.graph, t), ctx.corpus, ctx.embedder,
                                             cfg.fusion.passages_per_fact)) {
            push_unit(out.units, seen, p.key);
          }
        }
        out.cell_units.push_back({t.cell_id});
        if (i + 1 == natural_k) out.natural_units = out.units.size();
      }
      if (result.tuples.size() < natural_k) out.natural_units = out.units.size();
      out.natural_cell_units = std::min(natural_k, result.tuples.size());
      std::vector<EvidenceTuple> natural(result.tuples.begin(),
                                         result.tuples.begin() + static_cast<std::ptrdiff_t>(out.natural_cell_units));
      pkg = build_package(ctx.graph, ctx.corpus, natural, q, rc, cfg.fusion, ctx.embedder);
    } else {
      for (std::size_t i = 0; i < result.chunks.size(); ++i) {
        const auto& c = ctx.chunks.at(result.chunks[i].index);
        push_unit(out.units, seen, c.passage_id.empty() ? table_key(c.doc_id, c.table_id) : c.chunk_id);
        out.cell_units.push_back(c.cell_ids);
        if (i + 1 == natural_k) out.natural_units = out.units.size();
      }
      if (result.chunks.size() < natural_k) out.natural_units = out.units.size();
      out.natural_cell_units = std::min(natural_k, result.chunks.size());
      std::vector<ScoredChunk> natural(result.chunks.begin(),
                                       result.chunks.begin() + static_cast<std::ptrdiff_t>(out.natural_cell_units));
      pkg = build_chunk_package(ctx.chunks, natural, q);
    }

    if (ctx.llm != nullptr && (!pkg.facts.empty() || !pkg.passages.empty())) {
      const auto answer = generate_answer(assemble_prompt(pkg, cfg.fusion.prompt_budget), pkg, *ctx.llm);
      out.answer = answer.text;
    }
    if (ctx.llm != nullptr) {
      if (!item.gold_values.empty()) out.value_recall = exact_value_recall(out.answer, item.gold_values);
      if (!text::is_blank(item.gold_answer)) {
        out.claims = claim_alignment(out.answer, item.gold_answer, ctx.embedder, cfg.claim_threshold);
      }
    }
  } catch (const Error& e) {
    out.failure = e.what();
    spdlog::warn("query {} failed: {}", item.query_id, e.what());
  }
  return out;
}

MetricReport aggregate(const std::vector<QaItem>& items, const std::vector<QueryOutcome>& outcomes,
                       int flag, const std::vector<std::size_t>& cutoffs, const std::string& label) {
  MetricReport r;
  r.label = label;
  r.flag = flag;
  for (std::size_t k : cutoffs) r.per_k.push_back(MetricRow{k});
  double value_sum = 0;
  double claim_p = 0;
  double claim_r = 0;
  std::size_t value_n = 0;
  std::size_t claim_n = 0;

  auto add_row = [](MetricRow& row, const std::vector<std::string>& units,
                    const std::vector<std::vector<std::string>>& cell_units, const std::set<std::string>& gold,
                    const std::set<std::string>& gold_cells, std::size_t k, std::size_t cell_k) {
    row.hit_rate += hit_at_k(units, gold, k).value();
    row.recall += recall_at_k(units, gold, k).value();
    row.precision += precision_at_k(units, gold, k).value();
    if (!gold_cells.empty()) {
      const auto c = cell_metrics(cell_units, gold_cells, cell_k);
      row.cell_hit_rate += c.hit.value();
      row.cell_recall += c.recall.value();
      row.cell_precision += c.precision.value();
    }
  };

  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].flag != flag) continue;
    ++r.n_queries;
    const auto& o = outcomes.at(i);
    if (!o.failure.empty()) {
      ++r.n_failures;
      continue;
    }
    const auto gold = gold_units(items[i]);
    const std::set<std::string> gold_cells(items[i].gold_cell_ids.begin(), items[i].gold_cell_ids.end());
    for (auto& row : r.per_k) add_row(row, o.units, o.cell_units, gold, gold_cells, row.k, row.k);
    add_row(r.natural, o.units, o.cell_units, gold, gold_cells, std::max<std::size_t>(1, o.natural_units),
            std::max<std::size_t>(1, o.natural_cell_units));
    if (o.value_recall) {
      value_sum += o.value_recall->value();
      ++value_n;
    }
    if (o.claims) {
      claim_p += o.claims->precision.value();
      claim_r += o.claims->recall.value();
      ++claim_n;
    }
  }

  if (r.n_queries > 0) {
    const double n = static_cast<double>(r.n_queries);
    auto scale = [n](MetricRow& row) {
      row.hit_rate /= n;
      row.recall /= n;
      row.precision /= n;
      row.cell_hit_rate /= n;
      row.cell_recall /= n;
      row.cell_precision /= n;
    };
    for (auto& row : r.per_k) scale(row);
    scale(r.natural);
  }
  r.answers_scored = value_n;
  if (value_n > 0) r.value_accuracy_recall = value_sum / static_cast<double>(value_n);
  if (claim_n > 0) {
    r.claim_precision = claim_p / static_cast<double>(claim_n);
    r.claim_recall = claim_r / static_cast<double>(claim_n);
  }
  return r;
}

EvalOutput run_eval(const EvalContext& ctx, const std::vector<QaItem>& items, const EvalConfig& cfg) {
  check_cutoffs(cfg.cutoffs_f0);
  check_cutoffs(cfg.cutoffs_f1);
  EvalOutput out;
  out.outcomes.reserve(items.size());
  std::set<int> flags;
  for (const auto& item : items) {
    out.outcomes.push_back(evaluate_query(ctx, item, cfg));
    flags.insert(item.flag);
  }
  for (int flag : flags) {
    out.reports.push_back(aggregate(items, out.outcomes, flag, cutoffs_for(cfg, flag), cfg.label));
  }
  return out;
}

std::vector<EvalConfig> ablation_configs(const EvalConfig& base) {
  EvalConfig full = base;
  full.label = "full";
  full.retrieval.mode = RetrievalMode::SatGraph;
  full.retrieval.enable_sne = true;
  full.retrieval.enable_fusion = true;
  EvalConfig no_sat = full;
  no_sat.label = "w/o SAT";
  no_sat.retrieval.mode = RetrievalMode::ChunkBaseline;
  EvalConfig no_sne = full;
  no_sne.label = "w/o SNE";
  no_sne.retrieval.enable_sne = false;
  EvalConfig no_fusion = full;
  no_fusion.label = "w/o fusion";
  no_fusion.retrieval.enable_fusion = false;
  return {full, no_sat, no_sne, no_fusion};
}

std::string label_slug(std::string_view label) {
  std::string out;
  for (char c : text::to_lower(text::replace_all(std::string(label), "w/o", "wo"))) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (keep) {
      out.push_back(c);
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "report" : out;
}

namespace {

nlohmann::json row_json(const MetricRow& r) {
  return {{"k", r.k},
          {"hit_rate", r.hit_rate},
          {"recall", r.recall},
          {"precision", r.precision},
          {"cell_hit_rate", r.cell_hit_rate},
          {"cell_recall", r.cell_recall},
          {"cell_precision", r.cell_precision}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%8.4f", v);
  return buf;
}

}  // namespace

nlohmann::json MetricReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : per_k) rows.push_back(row_json(r));
  return {{"label", label},
          {"flag", flag},
          {"n_queries", n_queries},
          {"n_failures", n_failures},
          {"per_k", std::move(rows)},
          {"natural", row_json(natural)},
          {"value_accuracy_recall", value_accuracy_recall},
          {"claim_precision", claim_precision},
          {"claim_recall", claim_recall},
          {"answers_scored", answers_scored}};
}

std::string MetricReport::to_table() const {
  std::string out = "[" + label + "] f=" + std::to_string(flag) + "  queries=" + std::to_string(n_queries) +
                    "  failures=" + std::to_string(n_failures) + "\n";
  out += "metric  ";
  for (const auto& r : per_k) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%8s", ("@" + std::to_string(r.k)).c_str());
    out += buf;
  }
  out += " natural\n";
  const std::pair<const char*, double MetricRow::*> rows[] = {
      {"HR    ", &MetricRow::hit_rate},      {"R     ", &MetricRow::recall},
      {"P     ", &MetricRow::precision},     {"C-HR  ", &MetricRow::cell_hit_rate},
      {"C-R   ", &MetricRow::cell_recall},   {"C-P   ", &MetricRow::cell_precision}};
  for (const auto& [name, member] : rows) {
    out += std::string(name) + "  ";
    for (const auto& r : per_k) out += fmt(r.*member);
    out += fmt(natural.*member) + "\n";
  }
  out += "value-accuracy recall " + fmt(value_accuracy_recall) + "  claim P " + fmt(claim_precision) +
         "  claim R " + fmt(claim_recall) + "\n";
  return out;
}

}  // namespace satrag
