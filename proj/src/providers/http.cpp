#include <cstdlib>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "satrag/error.hpp"
#include "satrag/providers.hpp"

namespace satrag {

void validate_descriptor(const ProviderDescriptor& d) {
  split_endpoint(d.endpoint);
  if (d.model.empty()) throw Error(ErrorCode::ConfigError, "provider model name is empty");
  if (d.kind == ProviderKind::Embedding && (!d.dimension || *d.dimension == 0)) {
    throw Error(ErrorCode::ConfigError, "embedding provider requires a positive dimension");
  }
  if (d.max_in_flight == 0) throw Error(ErrorCode::ConfigError, "max_in_flight must be positive");
  if (d.max_attempts == 0) throw Error(ErrorCode::ConfigError, "max_attempts must be positive");
}

Endpoint split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigError, "endpoint '" + url + "' lacks a scheme");
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::ConfigError, "endpoint scheme must be http or https: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.scheme_host_port = url.substr(0, path_start);
  if (e.scheme_host_port.size() <= scheme_end + 3) {
    throw Error(ErrorCode::ConfigError, "endpoint '" + url + "' lacks a host");
  }
  if (path_start != std::string::npos) e.base_path = url.substr(path_start);
  while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  return e;
}

InFlightLimiter::InFlightLimiter(std::size_t limit) : limit_(limit == 0 ? 1 : limit) {}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return active_ < limit_; });
  ++active_;
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    --active_;
  }
  cv_.notify_one();
}

std::string embeddings_request_body(const std::string& model, const std::vector<std::string>& texts) {
  nlohmann::json j = {{"model", model}, {"input", texts}};
  return j.dump();
}

std::vector<Embedding> parse_embeddings_response(std::string_view body, std::size_t expected) {
  try {
    auto j = nlohmann::json::parse(body);
    std::vector<Embedding> out(expected);
    std::vector<bool> seen(expected, false);
    const auto& data = j.at("data");
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& item = data.at(i);
      const std::size_t index = item.contains("index") ? item.at("index").get<std::size_t>() : i;
      if (index >= expected || seen[index]) {
        throw Error(ErrorCode::ProviderFailure, "embedding response index out of range");
      }
      out[index] = item.at("embedding").get<Embedding>();
      seen[index] = true;
    }
    for (bool s : seen) {
      if (!s) throw Error(ErrorCode::ProviderFailure, "embedding response is missing vectors");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderFailure, std::string("malformed embeddings response: ") + e.what());
  }
}

std::string chat_request_body(const std::string& model, const std::string& prompt) {
  nlohmann::json j = {{"model", model},
                      {"messages", {{{"role", "user"}, {"content", prompt}}}},
                      {"temperature", 0}};
  return j.dump();
}

std::string parse_chat_response(std::string_view body) {
  std::string content;
  try {
    auto j = nlohmann::json::parse(body);
    const auto& message = j.at("choices").at(0).at("message");
    if (message.contains("content") && message.at("content").is_string()) {
      content = message.at("content").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderFailure, std::string("malformed chat response: ") + e.what());
  }
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::EmptyCompletion, "provider returned an empty completion");
  }
  return content;
}

namespace {

struct Slot {
  InFlightLimiter& limiter;
  explicit Slot(InFlightLimiter& l) : limiter(l) { limiter.acquire(); }
  ~Slot() { limiter.release(); }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;
};

// POSTs with retry on transport errors, 429 and 5xx. Other statuses fail at once.
std::string post_json(const ProviderDescriptor& d, const std::string& route, const std::string& body) {
  const auto endpoint = split_endpoint(d.endpoint);
  httplib::Headers headers;
  if (!d.api_key_env.empty()) {
    if (const char* key = std::getenv(d.api_key_env.c_str()); key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(d.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(d.timeout - seconds);

  std::string last_error;
  for (unsigned attempt = 0; attempt < d.max_attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(d.backoff_base * (1u << (attempt - 1)));
    httplib::Client client(endpoint.scheme_host_port);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    auto res = client.Post(endpoint.base_path + route, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      spdlog::debug("provider attempt {} failed: {}", attempt + 1, last_error);
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_error = "HTTP " + std::to_string(res->status);
    if (res->status != 429 && res->status < 500) break;
    spdlog::debug("provider attempt {} failed: {}", attempt + 1, last_error);
  }
  throw Error(ErrorCode::ProviderFailure, route + ": " + last_error);
}

}  // namespace

HttpEmbedder::HttpEmbedder(ProviderDescriptor d) : descriptor_(std::move(d)), limiter_(descriptor_.max_in_flight) {
  descriptor_.kind = ProviderKind::Embedding;
  validate_descriptor(descriptor_);
}

std::vector<Embedding> HttpEmbedder::embed(const std::vector<std::string>& texts) {
  detail::note_embedding_call();
  if (texts.empty()) return {};
  for (const auto& t : texts) {
    if (t.size() > descriptor_.max_input_bytes) {
      throw Error(ErrorCode::InputTooLong, "input of " + std::to_string(t.size()) + " bytes exceeds limit");
    }
  }
  Slot slot(limiter_);
  auto out = parse_embeddings_response(
      post_json(descriptor_, "/v1/embeddings", embeddings_request_body(descriptor_.model, texts)),
      texts.size());
  for (const auto& v : out) {
    if (v.size() != *descriptor_.dimension) {
      throw Error(ErrorCode::ProviderFailure, "embedding dimension " + std::to_string(v.size()) +
                                                  " differs from configured " +
                                                  std::to_string(*descriptor_.dimension));
    }
  }
  return out;
}

HttpCompletion::HttpCompletion(ProviderDescriptor d) : descriptor_(std::move(d)), limiter_(descriptor_.max_in_flight) {
  descriptor_.kind = ProviderKind::Completion;
  validate_descriptor(descriptor_);
}

std::string HttpCompletion::complete(const std::string& prompt) {
  if (prompt.size() > descriptor_.max_input_bytes) {
    throw Error(ErrorCode::InputTooLong, "prompt exceeds provider input limit");
  }
  Slot slot(limiter_);
  return parse_chat_response(
      post_json(descriptor_, "/v1/chat/completions", chat_request_body(descriptor_.model, prompt)));
}

}  // namespace satrag
