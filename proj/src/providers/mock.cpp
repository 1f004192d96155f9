#include <atomic>
#include <cmath>

#include "satrag/error.hpp"
#include "satrag/prompt_templates.hpp"
#include "satrag/providers.hpp"
#include "satrag/text.hpp"

namespace satrag {

namespace {
std::atomic<std::size_t> g_embedding_calls{0};
}

std::size_t embedding_calls_in_process() { return g_embedding_calls.load(); }
void detail::note_embedding_call() { ++g_embedding_calls; }

double cosine(const Embedding& a, const Embedding& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
  for (double x : a) na += x * x;
  for (double x : b) nb += x * x;
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

MockEmbedder::MockEmbedder(std::size_t dimension, std::size_t max_input_bytes)
    : dimension_(dimension), max_input_bytes_(max_input_bytes) {
  if (dimension_ == 0) throw Error(ErrorCode::ConfigError, "embedding dimension must be positive");
}

std::vector<Embedding> MockEmbedder::embed(const std::vector<std::string>& texts) {
  detail::note_embedding_call();
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    if (t.size() > max_input_bytes_) {
      throw Error(ErrorCode::InputTooLong, "input of " + std::to_string(t.size()) +
                                               " bytes exceeds limit " +
                                               std::to_string(max_input_bytes_));
    }
    Embedding v(dimension_, 0.0);
    for (const auto& tok : text::tokenize(t)) v[text::fnv1a64(tok) % dimension_] += 1.0;
    double norm = 0;
    for (double x : v) norm += x * x;
    if (norm > 0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Embedding> CachingEmbedder::embed(const std::vector<std::string>& texts) {
  detail::note_embedding_call();
  std::vector<Embedding> out(texts.size());
  std::vector<std::string> missing;
  std::vector<std::size_t> missing_at;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      auto it = cache_.find(texts[i]);
      if (it != cache_.end()) {
        out[i] = it->second;
      } else {
        missing.push_back(texts[i]);
        missing_at.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;
  auto fresh = inner_.embed(missing);
  std::lock_guard lock(mutex_);
  for (std::size_t j = 0; j < missing.size(); ++j) {
    cache_.emplace(missing[j], fresh[j]);
    out[missing_at[j]] = std::move(fresh[j]);
  }
  return out;
}

std::vector<Embedding> CountingEmbedder::embed(const std::vector<std::string>& texts) {
  detail::note_embedding_call();
  ++calls_;
  texts_ += texts.size();
  return inner_.embed(texts);
}

std::string prompt_section(std::string_view prompt, std::string_view heading) {
  std::string out;
  bool inside = false;
  for (const auto& line : text::split(prompt, '\n')) {
    if (!inside) {
      if (text::trim(line) == heading) inside = true;
      continue;
    }
    if (text::is_blank(line)) break;
    out += line;
    out += '\n';
  }
  return out;
}

namespace {

bool is_entity_prompt(std::string_view prompt) {
  return prompt.substr(0, 60) == prompts::kEntityExtraction.substr(0, 60);
}

bool is_validation_prompt(std::string_view prompt) {
  return prompt.substr(0, 60) == prompts::kQaValidation.substr(0, 60);
}

bool is_paraphrase_prompt(std::string_view prompt) {
  return prompt.substr(0, 40) == prompts::kParaphrase.substr(0, 40);
}

std::string after_marker(std::string_view prompt, std::string_view marker) {
  auto pos = prompt.rfind(marker);
  if (pos == std::string_view::npos) return {};
  return std::string(prompt.substr(pos + marker.size()));
}

// First non-empty document line, without heading marks.
std::string placeholder_entity(std::string_view prompt) {
  for (const auto& line : text::split(after_marker(prompt, "Document:\n"), '\n')) {
    std::string_view t = text::trim(line);
    while (!t.empty() && t.front() == '#') t.remove_prefix(1);
    t = text::trim(t);
    if (!t.empty()) {
      nlohmann::json j = {{"entity", std::string(t)}, {"type", "Company"}};
      return j.dump();
    }
  }
  return R"({"entity": "Unknown Entity", "type": "Company"})";
}

std::string echo(const std::string& prompt, bool with_passages) {
  if (is_entity_prompt(prompt)) return placeholder_entity(prompt);
  std::string out = "ECHO:\n" + prompt_section(prompt, "Facts:");
  if (with_passages) out += prompt_section(prompt, "Passages:");
  return out;
}

}  // namespace

std::string EchoCompletion::complete(const std::string& prompt) { return echo(prompt, false); }

std::string EvidenceEchoCompletion::complete(const std::string& prompt) { return echo(prompt, true); }

std::string ScriptedCompletion::complete(const std::string& prompt) {
  ++calls_;
  if (is_entity_prompt(prompt)) return placeholder_entity(prompt);
  if (is_paraphrase_prompt(prompt)) {
    std::string passage = after_marker(prompt, "Passage:\n");
    const auto values_line = after_marker(prompt.substr(0, prompt.rfind("Passage:\n")), "Values to remove: ");
    for (const auto& v : text::split(text::trim(values_line), ';')) {
      auto t = text::trim(v);
      if (!t.empty()) passage = text::replace_all(passage, t, "a reported amount");
    }
    return passage;
  }
  if (is_validation_prompt(prompt)) {
    if (mode_ == Mode::RejectAll) {
      return R"({"reject": true, "reason": "scripted rejection"})";
    }
    // Context lines look like "[n] <description> = <value>".
    std::vector<std::string> asks;
    std::vector<std::string> facts;
    for (const auto& line : text::split(after_marker(prompt, "Data (Stochastically Paired): "), '\n')) {
      auto t = std::string(text::trim(line));
      if (t.empty() || t.front() != '[') continue;
      auto close = t.find("] ");
      if (close == std::string::npos) continue;
      std::string body = t.substr(close + 2);
      auto eq = body.rfind(" = ");
      asks.push_back(eq == std::string::npos ? body : body.substr(0, eq));
      facts.push_back(body);
    }
    if (asks.empty()) return R"({"reject": true, "reason": "no cells supplied"})";
    nlohmann::json j = {{"question", "How do " + text::join(asks, " and ") + " compare?"},
                        {"answer", text::join(facts, "; ") + "."}};
    return j.dump();
  }
  return "ECHO:\n" + prompt_section(prompt, "Facts:");
}

std::string FailingCompletion::complete(const std::string&) {
  throw Error(ErrorCode::ProviderFailure, "completion endpoint unavailable");
}

}  // namespace satrag
