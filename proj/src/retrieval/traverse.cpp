#include <algorithm>
#include <cmath>

#include "satrag/error.hpp"
#include "satrag/retrieval.hpp"
#include "satrag/text.hpp"

namespace satrag {

double quantize_score(double s) { return std::round(s * 1e9) / 1e9; }

bool tuple_less(const EvidenceTuple& a, const EvidenceTuple& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.cell_id < b.cell_id;
}

namespace {

template <class Id>
std::vector<Id> best_matches(const std::vector<std::pair<Id, std::string>>& candidates,
                             std::string_view hint, Embedder& embedder, double tau,
                             std::string_view what) {
  if (candidates.empty()) {
    throw Error(ErrorCode::AnchorNotResolved, std::string(what) + " '" + std::string(hint) +
                                                  "': graph has no such nodes");
  }
  std::vector<std::string> texts;
  texts.reserve(candidates.size() + 1);
  texts.emplace_back(hint);
  for (const auto& c : candidates) texts.push_back(c.second);
  const auto vectors = embedder.embed(texts);

  double best = -1.0;
  std::vector<Id> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = quantize_score(cosine(vectors[0], vectors[i + 1]));
    if (s > best) {
      best = s;
      out.clear();
    }
    if (s == best) out.push_back(candidates[i].first);
  }
  if (best < tau) {
    throw Error(ErrorCode::AnchorNotResolved, std::string(what) + " '" + std::string(hint) +
                                                  "' matches no node above the threshold");
  }
  return out;
}

std::string temporal_form(std::string_view raw) {
  const auto v = normalize_temporal(raw);
  return v.is_temporal() ? v.canonical() : std::string(raw);
}

}  // namespace

std::vector<SubjectId> resolve_subject(const SATGraph& g, std::string_view hint, Embedder& embedder,
                                       double tau) {
  std::vector<std::pair<SubjectId, std::string>> candidates;
  for (const auto& [id, n] : g.subjects) {
    if (!n.sentinel) candidates.emplace_back(id, n.label);
  }
  return best_matches(candidates, hint, embedder, tau, "subject");
}

std::vector<TemporalId> resolve_temporal(const SATGraph& g, std::string_view hint, Embedder& embedder,
                                         double tau) {
  std::vector<std::pair<TemporalId, std::string>> candidates;
  for (const auto& [id, n] : g.temporals) {
    if (!n.sentinel) candidates.emplace_back(id, n.normalized.canonical());
  }
  return best_matches(candidates, temporal_form(hint), embedder, tau, "period");
}

std::vector<AttributeId> resolve_attribute(const SATGraph& g, std::string_view hint,
                                           Embedder& embedder, double tau) {
  std::vector<std::pair<AttributeId, std::string>> candidates;
  for (const auto& [id, a] : g.attributes) candidates.emplace_back(id, a.label);
  return best_matches(candidates, hint, embedder, tau, "attribute");
}

ForwardResult forward_traverse(const SATGraph& g, const std::optional<std::string>& subject_hint,
                               const std::optional<std::string>& temporal_hint, Embedder& embedder,
                               double tau) {
  if (!subject_hint && !temporal_hint) {
    throw Error(ErrorCode::AnchorNotResolved, "forward traversal needs a subject or period");
  }
  ForwardResult r;
  if (subject_hint) {
    r.subjects.emplace();
    for (auto s : resolve_subject(g, *subject_hint, embedder, tau)) {
      auto d = subject_descendants(g, s);
      r.subjects->insert(d.begin(), d.end());
    }
  }
  if (temporal_hint) {
    r.temporals.emplace();
    for (auto t : resolve_temporal(g, *temporal_hint, embedder, tau)) {
      auto d = temporal_descendants(g, t);
      r.temporals->insert(d.begin(), d.end());
    }
  }
  for (const auto& [id, a] : g.attributes) {
    for (const auto& [s, t] : a.anchors) {
      if (r.admits(s, t)) {
        r.attributes.insert(id);
        break;
      }
    }
  }
  return r;
}

ReverseResult reverse_traverse(const SATGraph& g, std::string_view attribute_hint, Embedder& embedder,
                               double tau) {
  ReverseResult r;
  for (auto a : resolve_attribute(g, attribute_hint, embedder, tau)) {
    r.attributes.insert(a);
    for (const auto& [s, t] : g.attribute(a).anchors) r.keys.insert({s, t, a});
  }
  return r;
}

namespace {

bool has_leaves(const SATGraph& g, const CompositeKey& k) {
  auto it = g.index.find(k);
  return it != g.index.end() && !it->second.empty();
}

std::set<CompositeKey> forward_keys(const SATGraph& g, const ForwardResult& f) {
  std::set<CompositeKey> out;
  for (const auto& [key, leaves] : g.index) {
    if (!leaves.empty() && f.attributes.count(key.attribute) != 0 && f.admits(key.subject, key.temporal)) {
      out.insert(key);
    }
  }
  return out;
}

std::set<CompositeKey> reverse_keys(const SATGraph& g, const ReverseResult& r) {
  std::set<CompositeKey> out;
  for (const auto& k : r.keys) {
    if (has_leaves(g, k)) out.insert(k);
  }
  return out;
}

}  // namespace

std::set<CompositeKey> intersect_paths(const SATGraph& g, const ForwardResult* forward,
                                       const ReverseResult* reverse) {
  if (forward == nullptr && reverse == nullptr) {
    throw Error(ErrorCode::EmptyIntersection, "no traversal path ran");
  }
  if (forward == nullptr) return reverse_keys(g, *reverse);
  if (reverse == nullptr) return forward_keys(g, *forward);
  std::set<CompositeKey> out;
  for (const auto& k : reverse->keys) {
    if (forward->attributes.count(k.attribute) != 0 && forward->admits(k.subject, k.temporal) &&
        has_leaves(g, k)) {
      out.insert(k);
    }
  }
  if (out.empty()) throw Error(ErrorCode::EmptyIntersection, "forward and reverse paths share no key");
  return out;
}

std::set<CompositeKey> union_paths(const SATGraph& g, const ForwardResult* forward,
                                   const ReverseResult* reverse) {
  std::set<CompositeKey> out;
  if (forward != nullptr) out = forward_keys(g, *forward);
  if (reverse != nullptr) {
    auto r = reverse_keys(g, *reverse);
    out.insert(r.begin(), r.end());
  }
  return out;
}

std::string key_text(const SATGraph& g, const CompositeKey& key) {
  std::vector<std::string> parts;
  const auto& s = g.subject(key.subject);
  if (!s.sentinel) parts.push_back(s.label);
  const auto& t = g.temporal(key.temporal);
  if (!t.sentinel) parts.push_back(t.raw_label);
  parts.push_back(g.attribute(key.attribute).label);
  return text::join(parts, " ");
}

namespace {

EvidenceTuple make_tuple(const SATGraph& g, LeafId id, double score, unsigned hop) {
  const auto& leaf = g.leaf(id);
  EvidenceTuple t;
  t.key = leaf.key;
  t.leaf = id;
  t.value = leaf.value;
  t.source_table = leaf.provenance.table_id;
  t.doc_id = leaf.provenance.doc_id;
  t.cell_id = leaf.provenance.cell_id;
  t.score = score;
  t.hop = hop;
  return t;
}

void append_key(const SATGraph& g, const CompositeKey& key, double score, unsigned hop,
                std::vector<EvidenceTuple>& out) {
  auto it = g.index.find(key);
  if (it == g.index.end()) return;
  for (LeafId id : it->second) out.push_back(make_tuple(g, id, score, hop));
}

}  // namespace

std::vector<EvidenceTuple> score_candidates(const SATGraph& g, const std::set<CompositeKey>& keys,
                                            const Query& q, Embedder& embedder) {
  if (keys.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(keys.size() + 1);
  texts.push_back(q.text);
  for (const auto& k : keys) texts.push_back(key_text(g, k));
  const auto vectors = embedder.embed(texts);

  std::vector<EvidenceTuple> out;
  std::size_t i = 1;
  for (const auto& k : keys) {
    append_key(g, k, quantize_score(cosine(vectors[0], vectors[i])), 0, out);
    ++i;
  }
  std::sort(out.begin(), out.end(), tuple_less);
  return out;
}

std::vector<EvidenceTuple> expand_neighbors(const SATGraph& g, const EvidenceTuple& focal, Intent intent,
                                            std::size_t radius) {
  std::vector<EvidenceTuple> out;
  if (radius == 0) return out;
  if (intent == Intent::TemporalComparison) {
    const auto& t = g.temporal(focal.key.temporal);
    if (t.sentinel) return out;
    std::vector<TemporalId> siblings;
    for (auto id : temporal_children(g, t.parent)) {
      if (g.temporal(id).normalized.kind == t.normalized.kind) siblings.push_back(id);
    }
    const auto self = std::find(siblings.begin(), siblings.end(), t.id);
    if (self == siblings.end()) return out;
    const auto pos = static_cast<std::ptrdiff_t>(self - siblings.begin());
    for (std::size_t d = 1; d <= radius; ++d) {
      const double score = quantize_score(focal.score * std::pow(kExpansionDecay, static_cast<double>(d)));
      for (std::ptrdiff_t p : {pos - static_cast<std::ptrdiff_t>(d), pos + static_cast<std::ptrdiff_t>(d)}) {
        if (p < 0 || p >= static_cast<std::ptrdiff_t>(siblings.size())) continue;
        append_key(g, {focal.key.subject, siblings[static_cast<std::size_t>(p)], focal.key.attribute},
                   score, static_cast<unsigned>(d), out);
      }
    }
  } else if (intent == Intent::SubjectBreakdown) {
    const auto& s = g.subject(focal.key.subject);
    if (!s.parent) return out;
    const double score = quantize_score(focal.score * kExpansionDecay);
    for (auto id : subject_children(g, s.parent)) {
      if (id == s.id) continue;
      append_key(g, {id, focal.key.temporal, focal.key.attribute}, score, 1, out);
    }
  }
  std::sort(out.begin(), out.end(), tuple_less);
  return out;
}

}  // namespace satrag
