#include "satrag/config.hpp"

#include <set>

#include "satrag/corpus.hpp"
#include "satrag/error.hpp"
#include "satrag/text.hpp"

namespace satrag {

using nlohmann::json;

RetrievalMode parse_retrieval_mode(std::string_view s) {
  if (s == "sat-graph") return RetrievalMode::SatGraph;
  if (s == "chunk-baseline") return RetrievalMode::ChunkBaseline;
  throw Error(ErrorCode::ConfigError, "unknown retrieval mode '" + std::string(s) + "'");
}

namespace {

bool secret_like(const std::string& key) {
  const auto k = text::to_lower(key);
  return k == "api_key" || k == "apikey" || k == "token" || k == "secret" || k == "password" ||
         k == "authorization";
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (secret_like(key)) {
      throw Error(ErrorCode::ConfigError, where + "." + key +
                                              ": secrets are read from environment variables, name one with "
                                              "api_key_env instead");
    }
    if (ok.count(key) == 0) throw Error(ErrorCode::ConfigError, where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, where + "." + key + ": " + e.what());
  }
}

void read_path(const json& j, const char* key, std::filesystem::path& out, const std::filesystem::path& base,
               const std::string& where) {
  std::string s;
  read(j, key, s, where);
  if (s.empty()) return;
  std::filesystem::path p(s);
  out = p.is_relative() && !base.empty() ? base / p : p;
}

void read_descriptor(const json& j, ProviderDescriptor& d, const std::string& where) {
  read(j, "endpoint", d.endpoint, where);
  read(j, "model", d.model, where);
  read(j, "api_key_env", d.api_key_env, where);
  read(j, "max_in_flight", d.max_in_flight, where);
  read(j, "max_attempts", d.max_attempts, where);
  read(j, "max_input_bytes", d.max_input_bytes, where);
  long long ms = -1;
  read(j, "timeout_ms", ms, where);
  if (ms >= 0) d.timeout = std::chrono::milliseconds(ms);
  ms = -1;
  read(j, "backoff_base_ms", ms, where);
  if (ms >= 0) d.backoff_base = std::chrono::milliseconds(ms);
}

json descriptor_json(const ProviderDescriptor& d) {
  return {{"endpoint", d.endpoint},
          {"model", d.model},
          {"api_key_env", d.api_key_env},
          {"timeout_ms", d.timeout.count()},
          {"max_in_flight", d.max_in_flight},
          {"max_attempts", d.max_attempts},
          {"backoff_base_ms", d.backoff_base.count()},
          {"max_input_bytes", d.max_input_bytes}};
}

}  // namespace

AppConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  AppConfig cfg;
  check_keys(j, "config",
             {"corpus_dir", "index_path", "embedding", "completion", "subject_extractor", "context_budget",
              "retrieval", "fusion", "eval", "gen", "verbose"});
  read_path(j, "corpus_dir", cfg.corpus_dir, base_dir, "config");
  read_path(j, "index_path", cfg.index_path, base_dir, "config");
  read(j, "subject_extractor", cfg.subject_extractor, "config");
  read(j, "context_budget", cfg.context_budget, "config");
  read(j, "verbose", cfg.verbose, "config");

  if (j.contains("embedding")) {
    const auto& e = j.at("embedding");
    check_keys(e, "embedding",
               {"kind", "dimension", "endpoint", "model", "api_key_env", "timeout_ms", "max_in_flight",
                "max_attempts", "backoff_base_ms", "max_input_bytes"});
    read(e, "kind", cfg.embedding.kind, "embedding");
    read(e, "dimension", cfg.embedding.dimension, "embedding");
    read_descriptor(e, cfg.embedding.http, "embedding");
    cfg.embedding.http.dimension = cfg.embedding.dimension;
  }
  if (j.contains("completion")) {
    const auto& c = j.at("completion");
    check_keys(c, "completion",
               {"kind", "endpoint", "model", "api_key_env", "timeout_ms", "max_in_flight", "max_attempts",
                "backoff_base_ms", "max_input_bytes"});
    read(c, "kind", cfg.completion.kind, "completion");
    read_descriptor(c, cfg.completion.http, "completion");
  }
  if (j.contains("retrieval")) {
    const auto& r = j.at("retrieval");
    check_keys(r, "retrieval",
               {"top_k", "similarity_threshold", "expansion_radius", "enable_sne", "enable_fusion", "mode"});
    read(r, "top_k", cfg.retrieval.top_k, "retrieval");
    read(r, "similarity_threshold", cfg.retrieval.similarity_threshold, "retrieval");
    read(r, "expansion_radius", cfg.retrieval.expansion_radius, "retrieval");
    read(r, "enable_sne", cfg.retrieval.enable_sne, "retrieval");
    read(r, "enable_fusion", cfg.retrieval.enable_fusion, "retrieval");
    std::string mode;
    read(r, "mode", mode, "retrieval");
    if (!mode.empty()) cfg.retrieval.mode = parse_retrieval_mode(mode);
  }
  if (j.contains("fusion")) {
    const auto& f = j.at("fusion");
    check_keys(f, "fusion", {"passages_per_fact", "prompt_budget"});
    read(f, "passages_per_fact", cfg.fusion.passages_per_fact, "fusion");
    read(f, "prompt_budget", cfg.fusion.prompt_budget, "fusion");
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    check_keys(e, "eval", {"cutoffs_f0", "cutoffs_f1", "claim_threshold"});
    read(e, "cutoffs_f0", cfg.cutoffs_f0, "eval");
    read(e, "cutoffs_f1", cfg.cutoffs_f1, "eval");
    read(e, "claim_threshold", cfg.claim_threshold, "eval");
  }
  if (j.contains("gen")) {
    const auto& g = j.at("gen");
    check_keys(g, "gen", {"seed", "associations", "n_pairs", "degree", "passage_window", "paraphrase"});
    read(g, "seed", cfg.gen.seed, "gen");
    read(g, "n_pairs", cfg.gen.n_pairs, "gen");
    read(g, "degree", cfg.gen.degree, "gen");
    read(g, "passage_window", cfg.gen.passage_window, "gen");
    read(g, "paraphrase", cfg.gen.paraphrase, "gen");
    std::vector<std::string> names;
    read(g, "associations", names, "gen");
    if (g.contains("associations")) {
      cfg.gen.associations.clear();
      for (const auto& n : names) cfg.gen.associations.push_back(parse_association(n));
    }
  }
  validate_config(cfg);
  return cfg;
}

json config_to_json(const AppConfig& cfg) {
  std::vector<std::string> associations;
  for (auto a : cfg.gen.associations) associations.emplace_back(to_string(a));
  json embedding = descriptor_json(cfg.embedding.http);
  embedding["kind"] = cfg.embedding.kind;
  embedding["dimension"] = cfg.embedding.dimension;
  json completion = descriptor_json(cfg.completion.http);
  completion["kind"] = cfg.completion.kind;
  return {{"corpus_dir", cfg.corpus_dir.string()},
          {"index_path", cfg.index_path.string()},
          {"embedding", std::move(embedding)},
          {"completion", std::move(completion)},
          {"subject_extractor", cfg.subject_extractor},
          {"context_budget", cfg.context_budget},
          {"retrieval",
           {{"top_k", cfg.retrieval.top_k},
            {"similarity_threshold", cfg.retrieval.similarity_threshold},
            {"expansion_radius", cfg.retrieval.expansion_radius},
            {"enable_sne", cfg.retrieval.enable_sne},
            {"enable_fusion", cfg.retrieval.enable_fusion},
            {"mode", std::string(to_string(cfg.retrieval.mode))}}},
          {"fusion", {{"passages_per_fact", cfg.fusion.passages_per_fact}, {"prompt_budget", cfg.fusion.prompt_budget}}},
          {"eval",
           {{"cutoffs_f0", cfg.cutoffs_f0}, {"cutoffs_f1", cfg.cutoffs_f1}, {"claim_threshold", cfg.claim_threshold}}},
          {"gen",
           {{"seed", cfg.gen.seed},
            {"associations", associations},
            {"n_pairs", cfg.gen.n_pairs},
            {"degree", cfg.gen.degree},
            {"passage_window", cfg.gen.passage_window},
            {"paraphrase", cfg.gen.paraphrase}}},
          {"verbose", cfg.verbose}};
}

AppConfig load_config(const std::filesystem::path& path) {
  std::string raw;
  try {
    raw = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, std::string("cannot read config: ") + e.what());
  }
  json j;
  try {
    j = json::parse(raw, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

void validate_config(const AppConfig& cfg) {
  check_cutoffs(cfg.cutoffs_f0);
  check_cutoffs(cfg.cutoffs_f1);
  if (cfg.retrieval.top_k == 0) throw Error(ErrorCode::ConfigError, "retrieval.top_k must be at least 1");
  if (cfg.retrieval.similarity_threshold < -1.0 || cfg.retrieval.similarity_threshold > 1.0) {
    throw Error(ErrorCode::ConfigError, "retrieval.similarity_threshold must lie in [-1, 1]");
  }
  if (cfg.claim_threshold < -1.0 || cfg.claim_threshold > 1.0) {
    throw Error(ErrorCode::ConfigError, "eval.claim_threshold must lie in [-1, 1]");
  }
  if (cfg.gen.degree < 2) throw Error(ErrorCode::ConfigError, "gen.degree must be at least 2");
  if (cfg.gen.associations.empty()) throw Error(ErrorCode::ConfigError, "gen.associations is empty");
  if (cfg.subject_extractor != "default" && cfg.subject_extractor != "llm") {
    throw Error(ErrorCode::ConfigError, "subject_extractor must be 'default' or 'llm'");
  }
  if (cfg.embedding.kind == "http") {
    validate_descriptor(cfg.embedding.http);
  } else if (cfg.embedding.kind != "mock") {
    throw Error(ErrorCode::ConfigError, "embedding.kind must be 'mock' or 'http'");
  } else if (cfg.embedding.dimension == 0) {
    throw Error(ErrorCode::ConfigError, "embedding.dimension must be positive");
  }
  static const std::set<std::string> completion_kinds = {"none", "echo", "evidence-echo", "scripted-accept",
                                                          "scripted-reject", "http"};
  if (completion_kinds.count(cfg.completion.kind) == 0) {
    throw Error(ErrorCode::ConfigError, "unknown completion.kind '" + cfg.completion.kind + "'");
  }
  if (cfg.completion.kind == "http") validate_descriptor(cfg.completion.http);
}

Providers make_providers(const AppConfig& cfg) {
  Providers p;
  if (cfg.embedding.kind == "http") {
    p.base = std::make_unique<HttpEmbedder>(cfg.embedding.http);
  } else {
    p.base = std::make_unique<MockEmbedder>(cfg.embedding.dimension);
  }
  p.cached = std::make_unique<CachingEmbedder>(*p.base);
  const auto& kind = cfg.completion.kind;
  if (kind == "echo") p.llm = std::make_unique<EchoCompletion>();
  else if (kind == "evidence-echo") p.llm = std::make_unique<EvidenceEchoCompletion>();
  else if (kind == "scripted-accept") p.llm = std::make_unique<ScriptedCompletion>(ScriptedCompletion::Mode::AcceptAll);
  else if (kind == "scripted-reject") p.llm = std::make_unique<ScriptedCompletion>(ScriptedCompletion::Mode::RejectAll);
  else if (kind == "http") p.llm = std::make_unique<HttpCompletion>(cfg.completion.http);
  return p;
}

std::unique_ptr<SubjectExtractor> make_subject_extractor(const AppConfig& cfg, CompletionProvider* llm) {
  if (cfg.subject_extractor == "llm") {
    if (llm == nullptr) throw Error(ErrorCode::ConfigError, "subject_extractor 'llm' needs a completion provider");
    return std::make_unique<LlmSubjectExtractor>(*llm);
  }
  return std::make_unique<DefaultSubjectExtractor>();
}

}  // namespace satrag
