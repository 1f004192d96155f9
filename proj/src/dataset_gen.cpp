#include <algorithm>
#include <random>
#include <set>

#include <spdlog/spdlog.h>

#include "satrag/dataset_gen.hpp"
#include "satrag/error.hpp"
#include "satrag/prompt_templates.hpp"
#include "satrag/random.hpp"
#include "satrag/sat_graph.hpp"
#include "satrag/temporal.hpp"
#include "satrag/text.hpp"

namespace satrag {

std::string_view to_string(Association a) {
  switch (a) {
    case Association::SameDate: return "same-date";
    case Association::SameSubject: return "same-subject";
    case Association::SameEntity: return "same-entity";
    case Association::Random: return "random";
  }
  return "random";
}

Association parse_association(std::string_view s) {
  for (auto a : {Association::SameDate, Association::SameSubject, Association::SameEntity, Association::Random}) {
    if (to_string(a) == s) return a;
  }
  throw Error(ErrorCode::ConfigError, "unknown association '" + std::string(s) + "'");
}

namespace {

// Extracts the outermost JSON object of a model answer.
std::optional<nlohmann::json> json_body(std::string_view answer) {
  const auto open = answer.find('{');
  const auto close = answer.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(answer.substr(open, close - open + 1));
    if (j.is_object()) return j;
  } catch (const nlohmann::json::exception&) {
  }
  return std::nullopt;
}

std::string non_blank_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) return {};
  return std::string(text::trim(j[key].get<std::string>()));
}

}  // namespace

void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

std::optional<std::string> association_key(const CellGroup& cg, Association a, SubjectExtractor& subjects) {
  switch (a) {
    case Association::Random: return std::string();
    case Association::SameEntity: {
      auto e = text::canonical_label(cg.doc_meta.entity);
      if (e.empty()) return std::nullopt;
      return e;
    }
    case Association::SameDate:
    case Association::SameSubject: {
      FactTuple fact;
      try {
        fact = lift_cell_group(cg, subjects);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoAttribute) throw;
        return std::nullopt;
      }
      if (a == Association::SameSubject) {
        if (fact.subject_path.empty()) return std::nullopt;
        return text::canonical_label(fact.subject_path.back());
      }
      if (fact.temporal_raw.empty()) return std::nullopt;
      const auto t = normalize_temporal(fact.temporal_raw);
      return t.is_temporal() ? t.canonical() : text::canonical_label(fact.temporal_raw);
    }
  }
  return std::nullopt;
}

std::vector<CandidatePair> draw_pairs(const std::vector<CellGroup>& groups, Association association,
                                      std::size_t n_pairs, std::uint64_t seed, std::size_t degree) {
  if (degree < 2) throw Error(ErrorCode::ConfigError, "pair degree must be at least 2");
  DefaultSubjectExtractor subjects;
  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  seeded_shuffle(order, seed);

  std::vector<CandidatePair> out;
  std::map<std::string, std::vector<std::size_t>> buckets;
  for (std::size_t idx : order) {
    if (out.size() >= n_pairs) break;
    const auto key = association_key(groups[idx], association, subjects);
    if (!key) continue;
    auto& bucket = buckets[*key];
    bucket.push_back(idx);
    if (bucket.size() < degree) continue;
    CandidatePair pair;
    pair.association = association;
    pair.seed = seed;
    for (std::size_t i : bucket) pair.cells.push_back(groups[i]);
    bucket.clear();
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<CandidatePair> pair_fields(const std::vector<CellGroup>& groups, Association association,
                                       std::size_t n_pairs, std::uint64_t seed, std::size_t degree) {
  auto pairs = draw_pairs(groups, association, n_pairs, seed, degree);
  if (pairs.size() < n_pairs) {
    throw Error(ErrorCode::InsufficientCandidates,
                std::string(to_string(association)) + " yields " + std::to_string(pairs.size()) +
                    " pairs, " + std::to_string(n_pairs) + " requested");
  }
  return pairs;
}

namespace {

constexpr std::size_t kEntityDocumentBudget = 6000;

std::string document_text(const Document& doc) {
  std::string out;
  if (!doc.title.empty()) out += "# " + doc.title + "\n\n";
  std::size_t next_passage = 0;
  auto emit_passages_until = [&](std::size_t anchor) {
    for (; next_passage < doc.passages.size() && next_passage < anchor; ++next_passage) {
      out += doc.passages[next_passage].text + "\n\n";
    }
  };
  for (const auto& t : doc.tables) {
    emit_passages_until(t.anchor);
    if (!t.caption.empty()) out += t.caption + "\n";
    out += serialize_table(t, TableFormat::Html) + "\n\n";
  }
  emit_passages_until(doc.passages.size());
  return text::utf8_truncate(out, kEntityDocumentBudget);
}

}  // namespace

std::string enrich_entity(const Document& doc, CompletionProvider& llm) {
  if (text::is_blank(doc.title) && doc.passages.empty()) {
    throw Error(ErrorCode::MalformedInput, "document " + doc.doc_id + " has neither title nor passages");
  }
  const auto prompt = text::replace_all(std::string(prompts::kEntityExtraction), "{document}", document_text(doc));
  const auto answer = llm.complete(prompt);
  const auto body = json_body(answer);
  if (!body) throw Error(ErrorCode::UnparseableEntity, "entity answer is not a JSON object");
  auto entity = non_blank_string(*body, "entity");
  if (entity.empty()) throw Error(ErrorCode::UnparseableEntity, "entity answer lacks an entity");
  return entity;
}

std::size_t enrich_corpus_entities(Corpus& corpus, CompletionProvider& llm) {
  std::size_t updated = 0;
  for (auto& doc : corpus.documents) {
    if (!text::is_blank(doc.entity)) continue;
    try {
      doc.entity = enrich_entity(doc, llm);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnparseableEntity) throw;
      spdlog::warn("entity of {} left empty: {}", doc.doc_id, e.what());
      continue;
    }
    for (auto& cg : corpus.cell_groups) {
      if (cg.doc_meta.doc_id == doc.doc_id) cg.doc_meta.entity = doc.entity;
    }
    ++updated;
  }
  return updated;
}

std::string pair_context(const CandidatePair& pair) {
  std::string out;
  for (std::size_t i = 0; i < pair.cells.size(); ++i) {
    const auto& cg = pair.cells[i];
    std::vector<std::string> labels;
    for (const auto& h : cg.header_path) labels.push_back(text::collapse_whitespace(h.label));
    std::vector<std::string> parts;
    if (!text::is_blank(cg.doc_meta.entity)) parts.push_back(text::collapse_whitespace(cg.doc_meta.entity));
    if (!text::is_blank(cg.table_caption)) parts.push_back(text::collapse_whitespace(cg.table_caption));
    if (!labels.empty()) parts.push_back(text::join(labels, " > "));
    out += "\n[" + std::to_string(i + 1) + "] " + text::join(parts, " | ") + " = " +
           text::collapse_whitespace(cg.value);
  }
  return out;
}

ValidationOutcome validate_pair(const CandidatePair& pair, CompletionProvider& llm) {
  if (pair.cells.size() < 2) throw Error(ErrorCode::ConfigError, "a candidate pair needs at least two cells");
  const auto prompt = text::replace_all(std::string(prompts::kQaValidation), "{context}", pair_context(pair));
  const auto body = json_body(llm.complete(prompt));
  if (!body) throw Error(ErrorCode::UnparseableValidation, "validation answer is not a JSON object");
  ValidationOutcome out;
  if (body->contains("reject") && (*body)["reject"] == true) {
    out.reject_reason = non_blank_string(*body, "reason");
    if (out.reject_reason.empty()) out.reject_reason = "unspecified";
    return out;
  }
  auto question = non_blank_string(*body, "question");
  auto answer = non_blank_string(*body, "answer");
  if (question.empty() || answer.empty()) {
    throw Error(ErrorCode::UnparseableValidation, "validation answer lacks question/answer or reject");
  }
  out.draft = QAPairDraft{std::move(question), std::move(answer), pair};
  return out;
}

std::vector<std::string> nearest_passages(const Document& doc, const Table& table, std::size_t window) {
  // Distance 1 for the passages just before and just after the table.
  std::vector<std::pair<std::size_t, std::size_t>> ranked;  // (distance, position)
  for (std::size_t p = 0; p < doc.passages.size(); ++p) {
    const std::size_t d = p < table.anchor ? table.anchor - p : p - table.anchor + 1;
    ranked.emplace_back(d, p);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < window; ++i) {
    out.push_back(passage_key(doc.doc_id, doc.passages[ranked[i].second].passage_id));
  }
  return out;
}

EmittedQa emit_qa(const std::vector<QAPairDraft>& drafts, const Corpus& corpus, std::size_t window) {
  EmittedQa out;
  std::set<std::pair<std::vector<std::string>, std::uint64_t>> seen;
  for (const auto& d : drafts) {
    std::vector<std::string> cells;
    for (const auto& cg : d.source.cells) cells.push_back(cg.cell_id);
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    if (!seen.emplace(cells, text::fnv1a64(d.question)).second) continue;

    char id[32];
    std::snprintf(id, sizeof(id), "q%04zu", seen.size());
    QaItem f0;
    f0.question = d.question;
    f0.gold_cell_ids = cells;
    f0.gold_answer = d.answer;
    for (const auto& cg : d.source.cells) f0.gold_values.push_back(text::normalize_value(cg.value));
    f0.query_id = std::string(id) + "-f0";
    f0.flag = 0;

    QaItem f1 = f0;
    f1.query_id = std::string(id) + "-f1";
    f1.flag = 1;
    std::set<std::string> tables_done;
    std::set<std::string> passages_seen;
    for (const auto& cg : d.source.cells) {
      if (!tables_done.insert(table_key(cg.doc_meta.doc_id, cg.table_id)).second) continue;
      const auto* doc = corpus.find_document(cg.doc_meta.doc_id);
      const auto* table = corpus.find_table(cg.doc_meta.doc_id, cg.table_id);
      if (doc == nullptr || table == nullptr) continue;
      for (auto& p : nearest_passages(*doc, *table, window)) {
        if (passages_seen.insert(p).second) f1.gold_passage_ids.push_back(std::move(p));
      }
    }
    out.f0.push_back(std::move(f0));
    out.f1.push_back(std::move(f1));
  }
  return out;
}

nlohmann::json GenReport::to_json() const {
  return {{"pairs_drawn", pairs_drawn},
          {"accepted", accepted},
          {"rejected", rejected},
          {"unparseable", unparseable},
          {"duplicates", duplicates},
          {"passages_paraphrased", passages_paraphrased},
          {"rejection_reasons", rejection_reasons},
          {"pairs_by_association", pairs_by_association},
          {"notes", notes}};
}

std::size_t paraphrase_value_leaks(Corpus& corpus, const std::vector<QaItem>& f1, CompletionProvider& llm) {
  // Raw cell values per gold passage, so "$1,234" is found as written.
  std::map<std::string, std::set<std::string>> values_by_passage;
  std::map<std::string, const CellGroup*> cells;
  for (const auto& cg : corpus.cell_groups) cells.emplace(cg.cell_id, &cg);
  for (const auto& item : f1) {
    for (const auto& p : item.gold_passage_ids) {
      for (const auto& c : item.gold_cell_ids) {
        auto it = cells.find(c);
        if (it != cells.end() && !text::is_blank(it->second->value)) {
          values_by_passage[p].insert(std::string(text::trim(it->second->value)));
        }
      }
    }
  }
  std::size_t changed = 0;
  for (auto& doc : corpus.documents) {
    for (auto& passage : doc.passages) {
      auto it = values_by_passage.find(passage_key(doc.doc_id, passage.passage_id));
      if (it == values_by_passage.end()) continue;
      std::vector<std::string> leaked;
      for (const auto& v : it->second) {
        if (passage.text.find(v) != std::string::npos) leaked.push_back(v);
      }
      if (leaked.empty()) continue;
      auto prompt = text::replace_all(std::string(prompts::kParaphrase), "{values}", text::join(leaked, "; "));
      prompt = text::replace_all(std::move(prompt), "{passage}", passage.text);
      auto rewritten = std::string(text::trim(llm.complete(prompt)));
      if (rewritten.empty()) throw Error(ErrorCode::EmptyCompletion, "empty paraphrase");
      passage.text = std::move(rewritten);
      ++changed;
    }
  }
  return changed;
}

GenResult generate_qa(Corpus& corpus, CompletionProvider& llm, const GenConfig& cfg) {
  GenResult result;
  auto& report = result.report;
  const auto enriched = enrich_corpus_entities(corpus, llm);
  if (enriched > 0) report.notes.push_back("entities filled for " + std::to_string(enriched) + " documents");

  std::vector<QAPairDraft> drafts;
  for (std::size_t a = 0; a < cfg.associations.size(); ++a) {
    const auto association = cfg.associations[a];
    // Each association gets its own stream so adding one leaves the others unchanged.
    const auto seed = cfg.seed + static_cast<std::uint64_t>(association) * 0x9E3779B97F4A7C15ULL;
    auto pairs = draw_pairs(corpus.cell_groups, association, cfg.n_pairs, seed, cfg.degree);
    const std::string name(to_string(association));
    report.pairs_by_association[name] = pairs.size();
    report.pairs_drawn += pairs.size();
    if (pairs.size() < cfg.n_pairs) {
      report.notes.push_back(name + ": insufficient candidates, " + std::to_string(pairs.size()) + " of " +
                             std::to_string(cfg.n_pairs) + " pairs drawn");
    }
    for (const auto& pair : pairs) {
      try {
        auto outcome = validate_pair(pair, llm);
        if (outcome.draft) {
          drafts.push_back(std::move(*outcome.draft));
        } else {
          ++report.rejected;
          ++report.rejection_reasons[outcome.reject_reason];
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnparseableValidation) throw;
        ++report.unparseable;
      }
    }
  }

  result.qa = emit_qa(drafts, corpus, cfg.passage_window);
  report.accepted = result.qa.f0.size();
  report.duplicates = drafts.size() - result.qa.f0.size();
  if (cfg.paraphrase) report.passages_paraphrased = paraphrase_value_leaks(corpus, result.qa.f1, llm);
  return result;
}

void write_gen_outputs(const GenResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "qa_f0.jsonl", qa_items_to_jsonl(result.qa.f0));
  write_file(dir / "qa_f1.jsonl", qa_items_to_jsonl(result.qa.f1));
  write_file(dir / "gen_report.json", result.report.to_json().dump(2) + "\n");
}

}  // namespace satrag
