#include "satrag/sat_graph.hpp"

#include <algorithm>
#include <deque>

#include "satrag/text.hpp"

namespace satrag {

template <class Tag>
std::string to_string(NodeId<Tag> id) {
  return text::hex64(id.value);
}
template std::string to_string(SubjectId);
template std::string to_string(TemporalId);
template std::string to_string(AttributeId);
template std::string to_string(LeafId);

namespace {

constexpr char kSep = '\x1f';

SubjectId subject_id(std::string_view label, std::optional<SubjectId> parent) {
  std::string key = "S";
  key += kSep;
  key += text::canonical_label(label);
  key += kSep;
  if (parent) key += text::hex64(parent->value);
  return {text::fnv1a64(key)};
}

TemporalId temporal_id(std::string_view canonical) {
  std::string key = "T";
  key += kSep;
  key += canonical;
  return {text::fnv1a64(key)};
}

AttributeId attribute_id(std::string_view label) {
  std::string key = "A";
  key += kSep;
  key += text::canonical_label(label);
  return {text::fnv1a64(key)};
}

LeafId leaf_id(std::string_view cell_id) {
  std::string key = "L";
  key += kSep;
  key += cell_id;
  return {text::fnv1a64(key)};
}

std::string display(std::string_view raw) { return text::collapse_whitespace(text::trim(raw)); }

// Keeps the lexicographically smallest raw spelling so the label does not
// depend on fact order.
void offer_label(std::string& slot, bool& set, const std::string& candidate) {
  if (!set || candidate < slot) {
    slot = candidate;
    set = true;
  }
}

bool fact_less(const FactTuple& a, const FactTuple& b) {
  return std::tie(a.provenance.cell_id, a.provenance.table_id, a.provenance.doc_id, a.subject_path,
                  a.temporal_raw, a.attribute, a.value) <
         std::tie(b.provenance.cell_id, b.provenance.table_id, b.provenance.doc_id, b.subject_path,
                  b.temporal_raw, b.attribute, b.value);
}

}  // namespace

SATGraph build_graph(const std::vector<FactTuple>& input) {
  std::vector<FactTuple> facts = input;
  std::sort(facts.begin(), facts.end(), fact_less);

  SATGraph g;
  std::map<SubjectId, bool> subject_label_set;
  std::map<TemporalId, std::set<std::string>> temporal_raws;
  std::map<AttributeId, bool> attribute_label_set;
  std::set<std::string> seen_cells;

  for (const auto& fact : facts) {
    if (!seen_cells.insert(fact.provenance.cell_id).second) continue;

    // Subject path: shared prefixes share nodes.
    std::optional<SubjectId> parent;
    std::vector<std::string> path;
    for (const auto& raw : fact.subject_path) {
      if (!text::is_blank(raw)) path.push_back(display(raw));
    }
    SubjectId s;
    if (path.empty()) {
      s = subject_id(kNoSubjectLabel, std::nullopt);
      auto& node = g.subjects[s];
      node.id = s;
      node.label = kNoSubjectLabel;
      node.sentinel = true;
    } else {
      for (const auto& label : path) {
        s = subject_id(label, parent);
        auto& node = g.subjects[s];
        node.id = s;
        node.parent = parent;
        offer_label(node.label, subject_label_set[s], label);
        parent = s;
      }
    }

    // Temporal chain, finest first.
    const auto value = normalize_temporal(fact.temporal_raw);
    TemporalId t;
    if (!value.is_temporal()) {
      t = temporal_id(kNoPeriodLabel);
      auto& node = g.temporals[t];
      node.id = t;
      node.raw_label = kNoPeriodLabel;
      node.sentinel = true;
    } else {
      const auto chain = value.chain();
      std::optional<TemporalId> above;
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const TemporalId id = temporal_id(it->canonical());
        auto& node = g.temporals[id];
        node.id = id;
        node.normalized = *it;
        node.parent = above;
        above = id;
      }
      t = temporal_id(value.canonical());
      temporal_raws[t].insert(display(fact.temporal_raw));
    }

    const auto attr_label = display(fact.attribute);
    const AttributeId a = attribute_id(attr_label);
    auto& attr = g.attributes[a];
    attr.id = a;
    offer_label(attr.label, attribute_label_set[a], attr_label);
    attr.anchors.insert({s, t});

    ValueLeaf leaf;
    leaf.id = leaf_id(fact.provenance.cell_id);
    leaf.value = fact.value;
    leaf.key = {s, t, a};
    leaf.provenance = fact.provenance;
    g.index[leaf.key].insert(leaf.id);
    g.leaves.emplace(leaf.id, std::move(leaf));
  }

  for (auto& [id, node] : g.temporals) {
    if (node.sentinel) continue;
    auto it = temporal_raws.find(id);
    node.raw_label = it != temporal_raws.end() ? *it->second.begin() : node.normalized.canonical();
  }
  return g;
}

std::string corpus_hash(const std::vector<CellGroup>& groups) {
  std::vector<std::string> lines;
  lines.reserve(groups.size());
  for (const auto& g : groups) lines.push_back(cell_group_to_json(g).dump());
  std::sort(lines.begin(), lines.end());
  return text::hex64(text::fnv1a64(text::join(lines, "\n")));
}

std::vector<SubjectId> subject_children(const SATGraph& g, std::optional<SubjectId> parent) {
  std::vector<SubjectId> out;
  for (const auto& [id, node] : g.subjects) {
    if (node.parent == parent) out.push_back(id);
  }
  return out;
}

std::vector<TemporalId> temporal_children(const SATGraph& g, std::optional<TemporalId> parent) {
  std::vector<const TemporalNode*> nodes;
  for (const auto& [id, node] : g.temporals) {
    if (node.parent == parent) nodes.push_back(&node);
  }
  auto start = [](const TemporalNode* n) {
    auto iv = n->normalized.interval();
    return iv ? iv->first : std::numeric_limits<std::int64_t>::max();
  };
  std::sort(nodes.begin(), nodes.end(), [&](const TemporalNode* a, const TemporalNode* b) {
    const auto sa = start(a);
    const auto sb = start(b);
    if (sa != sb) return sa < sb;
    return a->normalized.canonical() < b->normalized.canonical();
  });
  std::vector<TemporalId> out;
  for (const auto* n : nodes) out.push_back(n->id);
  return out;
}

namespace {

template <class Id, class Node>
std::set<Id> descendants(const std::map<Id, Node>& nodes, Id root) {
  std::map<Id, std::vector<Id>> children;
  for (const auto& [id, node] : nodes) {
    if (node.parent) children[*node.parent].push_back(id);
  }
  std::set<Id> out{root};
  std::deque<Id> queue{root};
  while (!queue.empty()) {
    const Id cur = queue.front();
    queue.pop_front();
    auto it = children.find(cur);
    if (it == children.end()) continue;
    for (Id c : it->second) {
      if (out.insert(c).second) queue.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::set<SubjectId> subject_descendants(const SATGraph& g, SubjectId root) {
  return descendants(g.subjects, root);
}

std::set<TemporalId> temporal_descendants(const SATGraph& g, TemporalId root) {
  return descendants(g.temporals, root);
}

std::vector<SubjectId> subject_path_ids(const SATGraph& g, SubjectId leaf) {
  std::vector<SubjectId> path;
  std::set<SubjectId> seen;
  std::optional<SubjectId> cur = leaf;
  while (cur && seen.insert(*cur).second) {
    path.push_back(*cur);
    auto it = g.subjects.find(*cur);
    if (it == g.subjects.end()) break;
    cur = it->second.parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::map<std::string, LeafId> leaves_by_cell(const SATGraph& g) {
  std::map<std::string, LeafId> out;
  for (const auto& [id, leaf] : g.leaves) out.emplace(leaf.provenance.cell_id, id);
  return out;
}

bool ValidationReport::has(const std::string& check) const {
  return std::any_of(findings.begin(), findings.end(),
                     [&](const ValidationFinding& f) { return f.check == check; });
}

namespace {

// Kahn's algorithm over every node and edge kind: subject and temporal
// parent edges, anchor edges into attributes, and key edges into leaves.
bool acyclic(const SATGraph& g) {
  std::map<std::string, std::vector<std::string>> edges;
  std::map<std::string, std::size_t> indegree;
  auto node = [&](char kind, std::uint64_t v) {
    std::string key(1, kind);
    key += text::hex64(v);
    indegree.emplace(key, 0);
    return key;
  };
  auto edge = [&](const std::string& from, const std::string& to) {
    edges[from].push_back(to);
    ++indegree[to];
  };
  for (const auto& [id, n] : g.subjects) {
    auto self = node('S', id.value);
    if (n.parent) edge(node('S', n.parent->value), self);
  }
  for (const auto& [id, n] : g.temporals) {
    auto self = node('T', id.value);
    if (n.parent) edge(node('T', n.parent->value), self);
  }
  for (const auto& [id, a] : g.attributes) {
    auto self = node('A', id.value);
    for (const auto& [s, t] : a.anchors) {
      edge(node('S', s.value), self);
      edge(node('T', t.value), self);
    }
  }
  for (const auto& [id, leaf] : g.leaves) {
    edge(node('A', leaf.key.attribute.value), node('L', id.value));
  }
  std::deque<std::string> ready;
  for (const auto& [key, d] : indegree) {
    if (d == 0) ready.push_back(key);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto cur = ready.front();
    ready.pop_front();
    ++visited;
    for (const auto& next : edges[cur]) {
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  return visited == indegree.size();
}

}  // namespace

ValidationReport validate_graph(const SATGraph& g, const std::set<std::string>* known_cells) {
  ValidationReport r;
  r.subjects = g.subjects.size();
  r.temporals = g.temporals.size();
  r.attributes = g.attributes.size();
  r.leaves = g.leaves.size();
  r.keys = g.index.size();
  auto add = [&](std::string check, std::string detail) {
    r.findings.push_back({std::move(check), std::move(detail)});
  };

  if (!acyclic(g)) add("acyclic", "parent, anchor or key edges form a cycle");

  for (const auto& [id, n] : g.subjects) {
    if (n.parent && g.subjects.count(*n.parent) == 0) {
      add("key-components", "subject " + to_string(id) + " has a missing parent");
    }
  }
  for (const auto& [id, n] : g.temporals) {
    if (n.parent && g.temporals.count(*n.parent) == 0) {
      add("key-components", "temporal " + to_string(id) + " has a missing parent");
    }
  }
  for (const auto& [id, leaf] : g.leaves) {
    const auto& k = leaf.key;
    if (g.subjects.count(k.subject) == 0 || g.temporals.count(k.temporal) == 0 ||
        g.attributes.count(k.attribute) == 0) {
      add("key-components", "leaf " + leaf.provenance.cell_id + " references a missing node");
    }
  }

  // Sibling subjects and attributes must be distinct after canonicalization.
  std::map<std::pair<std::optional<SubjectId>, std::string>, SubjectId> subject_names;
  for (const auto& [id, n] : g.subjects) {
    auto [it, fresh] = subject_names.emplace(std::make_pair(n.parent, text::canonical_label(n.label)), id);
    if (!fresh) add("subject-uniqueness", "duplicate subject label '" + n.label + "'");
  }
  std::map<std::string, AttributeId> attribute_names;
  for (const auto& [id, a] : g.attributes) {
    if (!attribute_names.emplace(text::canonical_label(a.label), id).second) {
      add("attribute-uniqueness", "duplicate attribute label '" + a.label + "'");
    }
  }

  std::map<std::string, std::size_t> cell_counts;
  for (const auto& [id, leaf] : g.leaves) {
    if (leaf.id != id) add("bijection", "leaf stored under a foreign id");
    ++cell_counts[leaf.provenance.cell_id];
  }
  for (const auto& [cell, count] : cell_counts) {
    if (count > 1) add("bijection", "cell " + cell + " backs " + std::to_string(count) + " leaves");
  }

  for (const auto& [id, leaf] : g.leaves) {
    auto it = g.index.find(leaf.key);
    if (it == g.index.end() || it->second.count(id) == 0) {
      add("index-inverse", "leaf " + leaf.provenance.cell_id + " missing from its key's leaf set");
    }
  }
  for (const auto& [key, ids] : g.index) {
    if (ids.empty()) add("index-inverse", "composite key with an empty leaf set");
    for (LeafId id : ids) {
      auto it = g.leaves.find(id);
      if (it == g.leaves.end()) {
        add("index-inverse", "index names unknown leaf " + to_string(id));
      } else if (!(it->second.key == key)) {
        add("index-inverse", "leaf " + it->second.provenance.cell_id + " indexed under a foreign key");
      }
    }
  }

  for (const auto& [id, a] : g.attributes) {
    if (a.anchors.empty()) add("orphan-attribute", "attribute '" + a.label + "' has no anchors");
    for (const auto& [s, t] : a.anchors) {
      auto it = g.index.find({s, t, id});
      if (it == g.index.end() || it->second.empty()) {
        add("anchor-soundness", "attribute '" + a.label + "' anchored at a context without leaves");
      }
    }
  }
  for (const auto& [key, ids] : g.index) {
    auto it = g.attributes.find(key.attribute);
    if (it != g.attributes.end() && it->second.anchors.count({key.subject, key.temporal}) == 0) {
      add("anchor-soundness", "key of attribute '" + it->second.label + "' lacks its anchor");
    }
  }

  for (const auto& [id, n] : g.temporals) {
    if (!n.parent) continue;
    auto p = g.temporals.find(*n.parent);
    if (p == g.temporals.end()) continue;
    const auto child = n.normalized.interval();
    const auto parent = p->second.normalized.interval();
    if (child && parent && !parent->contains(*child)) {
      add("temporal-containment", n.raw_label + " is not inside " + p->second.raw_label);
    }
  }

  if (known_cells != nullptr) {
    for (const auto& [id, leaf] : g.leaves) {
      if (known_cells->count(leaf.provenance.cell_id) == 0) {
        add("dangling-provenance", "leaf cell " + leaf.provenance.cell_id + " has no cell group");
      }
    }
  }
  return r;
}

}  // namespace satrag
