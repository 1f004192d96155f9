#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satrag/cellgroups.hpp"

namespace satrag {

using Embedding = std::vector<double>;

// Embedding requests made by any built-in embedder in this process. Lets
// callers prove a stage never touched vector similarity.
std::size_t embedding_calls_in_process();
namespace detail {
void note_embedding_call();
}

// 0 when either side is the zero vector.
double cosine(const Embedding& a, const Embedding& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  // One vector per input, same order.
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
  virtual std::size_t dimension() const = 0;

  Embedding embed_one(const std::string& text) { return embed({text}).front(); }
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Bag-of-tokens hashing embedder. Tokens are lower-cased alphanumeric runs,
// each hashed with FNV-1a 64 into one of `dimension` buckets; the count
// vector is L2-normalized. Text without tokens maps to the zero vector.
class MockEmbedder final : public Embedder {
 public:
  explicit MockEmbedder(std::size_t dimension = 256, std::size_t max_input_bytes = 1 << 20);
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  std::size_t dimension() const override { return dimension_; }

 private:
  std::size_t dimension_;
  std::size_t max_input_bytes_;
};

// Memoizes another embedder by exact text. Thread-safe.
class CachingEmbedder final : public Embedder {
 public:
  explicit CachingEmbedder(Embedder& inner) : inner_(inner) {}
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  std::size_t dimension() const override { return inner_.dimension(); }

 private:
  Embedder& inner_;
  std::mutex mutex_;
  std::map<std::string, Embedding, std::less<>> cache_;
};

// Forwards to another embedder and counts calls and texts.
class CountingEmbedder final : public Embedder {
 public:
  explicit CountingEmbedder(Embedder& inner) : inner_(inner) {}
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  std::size_t dimension() const override { return inner_.dimension(); }

  std::size_t calls() const { return calls_.load(); }
  std::size_t texts() const { return texts_.load(); }

 private:
  Embedder& inner_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> texts_{0};
};

// Returns "ECHO:\n" followed by the prompt's Facts section. Entity-extraction
// prompts get a fixed placeholder entity body instead.
class EchoCompletion final : public CompletionProvider {
 public:
  std::string complete(const std::string& prompt) override;
};

// Like EchoCompletion but also echoes the Passages section, so answers carry
// whatever text evidence the prompt supplied.
class EvidenceEchoCompletion final : public CompletionProvider {
 public:
  std::string complete(const std::string& prompt) override;
};

// Canned responses for offline pipelines. Validation prompts get an accept
// body (question/answer derived from the prompt) or a reject body; entity
// prompts get a placeholder entity.
class ScriptedCompletion final : public CompletionProvider {
 public:
  enum class Mode { AcceptAll, RejectAll };
  explicit ScriptedCompletion(Mode mode = Mode::AcceptAll) : mode_(mode) {}
  std::string complete(const std::string& prompt) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  Mode mode_;
  std::atomic<std::size_t> calls_{0};
};

// Always throws ProviderFailure; stands in for a failing endpoint.
class FailingCompletion final : public CompletionProvider {
 public:
  std::string complete(const std::string& prompt) override;
};

// Extracts "Facts:" / "Passages:" section bodies from an assembled prompt.
std::string prompt_section(std::string_view prompt, std::string_view heading);

class SubjectExtractor {
 public:
  virtual ~SubjectExtractor() = default;
  // Root-to-leaf subject labels; may be empty.
  virtual std::vector<std::string> extract(const DocumentMetadata& meta, std::string_view context) = 0;
};

// [entity], or nothing when the entity is empty.
class DefaultSubjectExtractor final : public SubjectExtractor {
 public:
  std::vector<std::string> extract(const DocumentMetadata& meta, std::string_view context) override;
};

// Parses a one-line "A > B > C" answer. Throws UnparseableSubject otherwise.
std::vector<std::string> parse_subject_path(std::string_view answer);

// Asks a completion provider for the subject hierarchy; falls back to the
// default path when the answer is unparseable. Results are memoized per
// document.
class LlmSubjectExtractor final : public SubjectExtractor {
 public:
  explicit LlmSubjectExtractor(CompletionProvider& llm) : llm_(llm) {}
  std::vector<std::string> extract(const DocumentMetadata& meta, std::string_view context) override;

 private:
  CompletionProvider& llm_;
  std::mutex mutex_;
  std::map<std::string, std::vector<std::string>> cache_;
};

enum class ProviderKind { Embedding, Completion };

struct ProviderDescriptor {
  ProviderKind kind = ProviderKind::Embedding;
  std::string endpoint;  // base URL, e.g. https://api.example.com
  std::string model;
  std::chrono::milliseconds timeout{30000};
  std::optional<std::size_t> dimension;
  std::string api_key_env;  // name of the environment variable holding the key
  std::size_t max_in_flight = 4;
  unsigned max_attempts = 3;
  std::chrono::milliseconds backoff_base{500};
  std::size_t max_input_bytes = 32768;
};

// Throws ConfigError on a malformed endpoint or missing embedding dimension.
void validate_descriptor(const ProviderDescriptor& d);

struct Endpoint {
  std::string scheme_host_port;
  std::string base_path;  // without trailing '/'
};
Endpoint split_endpoint(const std::string& url);

// Bounded concurrency gate shared by the HTTP providers.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(std::size_t limit);
  void acquire();
  void release();

 private:
  std::size_t limit_;
  std::size_t active_ = 0;
  std::mutex mutex_;
  std::condition_variable_any cv_;
};

// OpenAI-compatible /v1/embeddings client.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(ProviderDescriptor d);
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  std::size_t dimension() const override { return *descriptor_.dimension; }

 private:
  ProviderDescriptor descriptor_;
  InFlightLimiter limiter_;
};

// OpenAI-compatible /v1/chat/completions client.
class HttpCompletion final : public CompletionProvider {
 public:
  explicit HttpCompletion(ProviderDescriptor d);
  std::string complete(const std::string& prompt) override;

 private:
  ProviderDescriptor descriptor_;
  InFlightLimiter limiter_;
};

// Request/response bodies, exposed for tests.
std::string embeddings_request_body(const std::string& model, const std::vector<std::string>& texts);
std::vector<Embedding> parse_embeddings_response(std::string_view body, std::size_t expected);
std::string chat_request_body(const std::string& model, const std::string& prompt);
std::string parse_chat_response(std::string_view body);

}  // namespace satrag
