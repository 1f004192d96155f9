#include <fstream>
#include <sstream>

#include "satrag/error.hpp"
#include "satrag/sat_graph.hpp"
#include "satrag/text.hpp"

namespace satrag {

namespace {

using nlohmann::json;

template <class Tag>
NodeId<Tag> parse_id(const json& j) {
  const auto s = j.get<std::string>();
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw Error(ErrorCode::CorruptIndex, "bad node id '" + s + "'");
  }
  return {std::stoull(s, nullptr, 16)};
}

template <class Tag>
json optional_id(const std::optional<NodeId<Tag>>& id) {
  return id ? json(to_string(*id)) : json(nullptr);
}

template <class Tag>
std::optional<NodeId<Tag>> parse_optional_id(const json& j) {
  if (j.is_null()) return std::nullopt;
  return parse_id<Tag>(j);
}

json key_to_json(const CompositeKey& k) {
  return json::array({to_string(k.subject), to_string(k.temporal), to_string(k.attribute)});
}

CompositeKey key_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::CorruptIndex, "bad composite key");
  return {parse_id<SubjectTag>(j[0]), parse_id<TemporalTag>(j[1]), parse_id<AttributeTag>(j[2])};
}

json index_to_json(const std::map<CompositeKey, std::set<LeafId>>& index) {
  json out = json::array();
  for (const auto& [key, ids] : index) {
    json leaves = json::array();
    for (LeafId id : ids) leaves.push_back(to_string(id));
    out.push_back({{"key", key_to_json(key)}, {"leaves", std::move(leaves)}});
  }
  return out;
}

}  // namespace

json graph_to_json(const SATGraph& g) {
  json subjects = json::array();
  for (const auto& [id, n] : g.subjects) {
    subjects.push_back({{"id", to_string(id)},
                        {"label", n.label},
                        {"parent", optional_id(n.parent)},
                        {"sentinel", n.sentinel}});
  }
  json temporals = json::array();
  for (const auto& [id, n] : g.temporals) {
    temporals.push_back({{"id", to_string(id)},
                         {"raw_label", n.raw_label},
                         {"normalized", n.normalized.canonical()},
                         {"parent", optional_id(n.parent)},
                         {"sentinel", n.sentinel}});
  }
  json attributes = json::array();
  for (const auto& [id, a] : g.attributes) {
    json anchors = json::array();
    for (const auto& [s, t] : a.anchors) anchors.push_back({to_string(s), to_string(t)});
    attributes.push_back({{"id", to_string(id)}, {"label", a.label}, {"anchors", std::move(anchors)}});
  }
  json leaves = json::array();
  for (const auto& [id, l] : g.leaves) {
    leaves.push_back({{"id", to_string(id)},
                      {"value", l.value},
                      {"key", key_to_json(l.key)},
                      {"cell_id", l.provenance.cell_id},
                      {"table_id", l.provenance.table_id},
                      {"doc_id", l.provenance.doc_id}});
  }
  return {{"header",
           {{"format_version", kGraphFormatVersion},
            {"corpus_hash", g.corpus_hash},
            {"counts",
             {{"subjects", g.subjects.size()},
              {"temporals", g.temporals.size()},
              {"attributes", g.attributes.size()},
              {"leaves", g.leaves.size()},
              {"keys", g.index.size()}}}}},
          {"subjects", std::move(subjects)},
          {"temporals", std::move(temporals)},
          {"attributes", std::move(attributes)},
          {"leaves", std::move(leaves)},
          {"index", index_to_json(g.index)}};
}

SATGraph graph_from_json(const json& j) {
  int version = 0;
  try {
    version = j.at("header").at("format_version").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptIndex, std::string("graph header unreadable: ") + e.what());
  }
  if (version != kGraphFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "graph format version " + std::to_string(version) +
                                                " is not supported (expected " +
                                                std::to_string(kGraphFormatVersion) + ")");
  }

  SATGraph g;
  try {
    g.corpus_hash = j.at("header").value("corpus_hash", "");
    for (const auto& js : j.at("subjects")) {
      SubjectNode n;
      n.id = parse_id<SubjectTag>(js.at("id"));
      n.label = js.at("label").get<std::string>();
      n.parent = parse_optional_id<SubjectTag>(js.at("parent"));
      n.sentinel = js.value("sentinel", false);
      g.subjects.emplace(n.id, std::move(n));
    }
    for (const auto& jt : j.at("temporals")) {
      TemporalNode n;
      n.id = parse_id<TemporalTag>(jt.at("id"));
      n.raw_label = jt.at("raw_label").get<std::string>();
      n.sentinel = jt.value("sentinel", false);
      const auto canonical = jt.at("normalized").get<std::string>();
      if (!canonical.empty()) {
        n.normalized = normalize_temporal(canonical);
        if (n.normalized.canonical() != canonical) {
          throw Error(ErrorCode::CorruptIndex, "unreadable temporal value '" + canonical + "'");
        }
      }
      n.parent = parse_optional_id<TemporalTag>(jt.at("parent"));
      g.temporals.emplace(n.id, std::move(n));
    }
    for (const auto& ja : j.at("attributes")) {
      AttributeNode a;
      a.id = parse_id<AttributeTag>(ja.at("id"));
      a.label = ja.at("label").get<std::string>();
      for (const auto& anchor : ja.at("anchors")) {
        a.anchors.insert({parse_id<SubjectTag>(anchor.at(0)), parse_id<TemporalTag>(anchor.at(1))});
      }
      g.attributes.emplace(a.id, std::move(a));
    }
    for (const auto& jl : j.at("leaves")) {
      ValueLeaf l;
      l.id = parse_id<LeafTag>(jl.at("id"));
      l.value = jl.at("value").get<std::string>();
      l.key = key_from_json(jl.at("key"));
      l.provenance = {jl.at("cell_id").get<std::string>(), jl.at("table_id").get<std::string>(),
                      jl.at("doc_id").get<std::string>()};
      g.leaves.emplace(l.id, std::move(l));
    }
    // The index is derived data: rebuild it and insist the stored copy agrees.
    for (const auto& [id, l] : g.leaves) g.index[l.key].insert(id);
    if (index_to_json(g.index) != j.at("index")) {
      throw Error(ErrorCode::CorruptIndex, "stored index is not the inverse of the leaf keys");
    }
    const auto& counts = j.at("header").at("counts");
    if (counts.at("subjects").get<std::size_t>() != g.subjects.size() ||
        counts.at("temporals").get<std::size_t>() != g.temporals.size() ||
        counts.at("attributes").get<std::size_t>() != g.attributes.size() ||
        counts.at("leaves").get<std::size_t>() != g.leaves.size() ||
        counts.at("keys").get<std::size_t>() != g.index.size()) {
      throw Error(ErrorCode::CorruptIndex, "record counts disagree with the header");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptIndex, std::string("graph records unreadable: ") + e.what());
  }
  return g;
}

void save_graph(const SATGraph& g, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp);
    out << graph_to_json(g).dump(1) << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot replace " + path.string() + ": " + ec.message());
}

SATGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open graph file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::CorruptIndex, "graph file " + path.string() + " is damaged: " + e.what());
  }
  return graph_from_json(j);
}

}  // namespace satrag
