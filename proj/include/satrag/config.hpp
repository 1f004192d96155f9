#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"
#include "satrag/dataset_gen.hpp"
#include "satrag/eval.hpp"
#include "satrag/fusion.hpp"
#include "satrag/providers.hpp"
#include "satrag/retrieval.hpp"

namespace satrag {

inline ProviderDescriptor descriptor_of(ProviderKind kind) {
  ProviderDescriptor d;
  d.kind = kind;
  return d;
}

struct EmbeddingSettings {
  std::string kind = "mock";  // mock | http
  std::size_t dimension = 256;
  ProviderDescriptor http = descriptor_of(ProviderKind::Embedding);
};

struct CompletionSettings {
  // none | echo | evidence-echo | scripted-accept | scripted-reject | http
  std::string kind = "echo";
  ProviderDescriptor http = descriptor_of(ProviderKind::Completion);
};

struct AppConfig {
  std::filesystem::path corpus_dir = "work/corpus";
  std::filesystem::path index_path = "work/graph.json";
  EmbeddingSettings embedding;
  CompletionSettings completion;
  std::string subject_extractor = "default";  // default | llm
  std::size_t context_budget = kDefaultContextBudget;
  RetrievalConfig retrieval;
  FusionConfig fusion;
  std::vector<std::size_t> cutoffs_f0{1, 3, 5, 10};
  std::vector<std::size_t> cutoffs_f1{4, 12, 20, 40};
  double claim_threshold = 0.6;
  GenConfig gen;
  bool verbose = false;
};

// Unknown keys, bad values and any key that looks like a secret are
// ConfigError. Relative paths are taken relative to base_dir.
AppConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const AppConfig& cfg);
// JSON with // and /* */ comments allowed.
AppConfig load_config(const std::filesystem::path& path);
// Cutoffs, thresholds and provider descriptors. Throws ConfigError.
void validate_config(const AppConfig& cfg);

RetrievalMode parse_retrieval_mode(std::string_view s);

// Providers built from a config. The embedder is always wrapped in a cache.
struct Providers {
  std::unique_ptr<Embedder> base;
  std::unique_ptr<CachingEmbedder> cached;
  std::unique_ptr<CompletionProvider> llm;  // null for kind "none"

  Embedder& embedder() { return *cached; }
  CompletionProvider* completion() { return llm.get(); }
};
Providers make_providers(const AppConfig& cfg);

std::unique_ptr<SubjectExtractor> make_subject_extractor(const AppConfig& cfg, CompletionProvider* llm);

}  // namespace satrag
