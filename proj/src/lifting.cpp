#include <algorithm>

#include <spdlog/spdlog.h>

#include "satrag/error.hpp"
#include "satrag/sat_graph.hpp"
#include "satrag/text.hpp"

namespace satrag {

namespace {

int granularity(TemporalKind kind) {
  switch (kind) {
    case TemporalKind::Day: return 5;
    case TemporalKind::Month: return 4;
    case TemporalKind::Quarter: return 3;
    case TemporalKind::Year: return 2;
    case TemporalKind::Interval: return 1;
    case TemporalKind::NotTemporal: return 0;
  }
  return 0;
}

}  // namespace

FactTuple lift_cell_group(const CellGroup& cg, SubjectExtractor& subject_extractor) {
  FactTuple fact;
  fact.value = cg.value;
  fact.provenance = {cg.cell_id, cg.table_id, cg.doc_meta.doc_id};
  fact.subject_path = subject_extractor.extract(cg.doc_meta, cg.doc_meta.context_snippet);

  std::set<std::string> subject_labels;
  for (const auto& s : fact.subject_path) subject_labels.insert(text::canonical_label(s));

  // Temporal slot: the finest-grained element wins; later elements break ties.
  const HeaderPathElement* temporal_element = nullptr;
  TemporalValue chosen;
  std::optional<int> year_context;
  std::vector<const HeaderPathElement*> rest;
  for (const auto& e : cg.header_path) {
    const auto v = normalize_temporal(e.label);
    if (v.is_temporal()) {
      if (v.kind == TemporalKind::Year) year_context = v.year;
      if (temporal_element == nullptr || granularity(v.kind) >= granularity(chosen.kind)) {
        temporal_element = &e;
        chosen = v;
      }
      continue;
    }
    if (subject_labels.count(text::canonical_label(e.label)) != 0) continue;
    rest.push_back(&e);
  }
  if (temporal_element != nullptr) {
    fact.temporal_raw = std::string(text::trim(temporal_element->label));
    // A bare quarter under a year header belongs to that year.
    if (chosen.kind == TemporalKind::Quarter && chosen.year == 0 && year_context) {
      fact.temporal_raw += " " + std::to_string(*year_context);
    }
  }

  if (rest.empty()) {
    throw Error(ErrorCode::NoAttribute,
                "cell " + cg.cell_id + " has no header left for the attribute");
  }
  std::stable_sort(rest.begin(), rest.end(), [](const HeaderPathElement* a, const HeaderPathElement* b) {
    const int ta = a->header_type == HeaderType::RowHeader ? 0 : 1;
    const int tb = b->header_type == HeaderType::RowHeader ? 0 : 1;
    if (ta != tb) return ta < tb;
    return a->tier < b->tier;
  });
  std::vector<std::string> parts;
  for (const auto* e : rest) parts.push_back(text::collapse_whitespace(text::trim(e->label)));
  fact.attribute = text::join(parts, " / ");
  return fact;
}

LiftReport lift_all(const std::vector<CellGroup>& groups, SubjectExtractor& subject_extractor) {
  LiftReport report;
  report.facts.reserve(groups.size());
  for (const auto& g : groups) {
    try {
      report.facts.push_back(lift_cell_group(g, subject_extractor));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAttribute) throw;
      spdlog::info("{}", e.what());
      report.rejected_cell_ids.push_back(g.cell_id);
    }
  }
  return report;
}

}  // namespace satrag
