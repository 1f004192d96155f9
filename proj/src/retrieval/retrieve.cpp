#include <map>

#include "satrag/error.hpp"
#include "satrag/retrieval.hpp"

namespace satrag {

std::string_view to_string(RetrievalMode mode) {
  return mode == RetrievalMode::SatGraph ? "sat-graph" : "chunk-baseline";
}

nlohmann::json RetrievalDiagnostics::to_json() const {
  return {{"notes", notes},
          {"resolved_subjects", resolved_subjects},
          {"resolved_temporals", resolved_temporals},
          {"resolved_attributes", resolved_attributes},
          {"forward_attributes", forward_attributes},
          {"reverse_keys", reverse_keys},
          {"intersection_keys", intersection_keys},
          {"fell_back_to_union", fell_back_to_union},
          {"focal", focal},
          {"expansion_added", expansion_added}};
}

namespace {

// Drops a hint that does not resolve, leaving a note.
template <class Resolver>
std::optional<std::string> usable(const std::optional<std::string>& hint, Resolver resolve,
                                  std::size_t& count, RetrievalDiagnostics& diag) {
  if (!hint) return std::nullopt;
  try {
    count = resolve(*hint).size();
    return hint;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AnchorNotResolved) throw;
    diag.notes.emplace_back(e.what());
    return std::nullopt;
  }
}

}  // namespace

RetrievalResult retrieve(const RetrievalContext& ctx, const Query& q, const RetrievalConfig& cfg) {
  if (cfg.top_k == 0) throw Error(ErrorCode::ConfigError, "top_k must be at least 1");
  RetrievalResult result;
  auto& diag = result.diagnostics;
  try {
    result.slots = ctx.analyzer.analyze(q);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoSlots) throw;
    diag.notes.emplace_back(e.what());
    if (cfg.mode == RetrievalMode::SatGraph) return result;
  }

  if (cfg.mode == RetrievalMode::ChunkBaseline) {
    result.chunks = baseline_chunk_retrieve(ctx.chunks, q, ctx.embedder, cfg.top_k);
    return result;
  }

  const auto& g = ctx.graph;
  const double tau = cfg.similarity_threshold;
  const auto subject = usable(
      result.slots.subject_hint, [&](const std::string& h) { return resolve_subject(g, h, ctx.embedder, tau); },
      diag.resolved_subjects, diag);
  const auto temporal = usable(
      result.slots.temporal_hint, [&](const std::string& h) { return resolve_temporal(g, h, ctx.embedder, tau); },
      diag.resolved_temporals, diag);
  const auto attribute = usable(
      result.slots.attribute_hint,
      [&](const std::string& h) { return resolve_attribute(g, h, ctx.embedder, tau); },
      diag.resolved_attributes, diag);

  std::optional<ForwardResult> forward;
  std::optional<ReverseResult> reverse;
  if (subject || temporal) {
    forward = forward_traverse(g, subject, temporal, ctx.embedder, tau);
    diag.forward_attributes = forward->attributes.size();
  }
  if (attribute) {
    reverse = reverse_traverse(g, *attribute, ctx.embedder, tau);
    diag.reverse_keys = reverse->keys.size();
  }
  if (!forward && !reverse) {
    diag.notes.emplace_back("no hint resolved to a graph node");
    return result;
  }

  const ForwardResult* fp = forward ? &*forward : nullptr;
  const ReverseResult* rp = reverse ? &*reverse : nullptr;
  std::set<CompositeKey> keys;
  try {
    keys = intersect_paths(g, fp, rp);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyIntersection) throw;
    diag.notes.emplace_back(e.what());
    diag.fell_back_to_union = true;
    keys = union_paths(g, fp, rp);
  }
  diag.intersection_keys = keys.size();

  auto focal = score_candidates(g, keys, q, ctx.embedder);
  diag.focal = focal.size();

  std::vector<EvidenceTuple> expanded;
  if (cfg.enable_sne && result.slots.intent != Intent::PointLookup && focal.size() < cfg.top_k) {
    std::set<std::string> focal_cells;
    for (const auto& t : focal) focal_cells.insert(t.cell_id);
    std::map<std::string, EvidenceTuple> best;
    for (const auto& t : focal) {
      for (auto& n : expand_neighbors(g, t, result.slots.intent, cfg.expansion_radius)) {
        if (focal_cells.count(n.cell_id) != 0) continue;
        auto it = best.find(n.cell_id);
        if (it == best.end()) {
          best.emplace(n.cell_id, std::move(n));
        } else if (n.score > it->second.score || (n.score == it->second.score && n.hop < it->second.hop)) {
          it->second = std::move(n);
        }
      }
    }
    for (auto& [cell, t] : best) expanded.push_back(std::move(t));
    std::sort(expanded.begin(), expanded.end(), tuple_less);
  }

  result.tuples = std::move(focal);
  if (result.tuples.size() > cfg.top_k) result.tuples.resize(cfg.top_k);
  for (auto& t : expanded) {
    if (result.tuples.size() >= cfg.top_k) break;
    result.tuples.push_back(std::move(t));
    ++diag.expansion_added;
  }
  return result;
}

}  // namespace satrag
