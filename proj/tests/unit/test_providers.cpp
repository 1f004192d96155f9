#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "satrag/error.hpp"
#include "satrag/prompt_templates.hpp"
#include "satrag/providers.hpp"
#include "satrag/text.hpp"

using namespace satrag;

namespace {

double norm(const Embedding& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Local OpenAI-compatible stand-in that fails a configurable number of times first.
class FakeServer {
 public:
  FakeServer() {
    server_.Post("/api/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      last_auth_ = req.get_header_value("Authorization");
      if (failures_left_ > 0) {
        --failures_left_;
        res.status = failure_status_;
        return;
      }
      const auto j = nlohmann::json::parse(req.body);
      nlohmann::json data = nlohmann::json::array();
      // Answer out of order to exercise index handling.
      for (std::size_t i = j.at("input").size(); i-- > 0;) {
        data.push_back({{"index", i}, {"embedding", {static_cast<double>(i), 1.0, 0.0}}});
      }
      res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
    });
    server_.Post("/api/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
      const auto j = nlohmann::json::parse(req.body);
      const auto prompt = j.at("messages").at(0).at("content").get<std::string>();
      nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "echo " + prompt}}}}}}};
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api/"; }
  void fail_next(int n, int status) {
    failures_left_ = n;
    failure_status_ = status;
  }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> failures_left_{0};
  int failure_status_ = 500;
  std::string last_auth_;
};

class FixedCompletion final : public CompletionProvider {
 public:
  explicit FixedCompletion(std::string text) : text_(std::move(text)) {}
  std::string complete(const std::string&) override { return text_; }

 private:
  std::string text_;
};

ProviderDescriptor http_descriptor(ProviderKind kind, const std::string& endpoint) {
  ProviderDescriptor d;
  d.kind = kind;
  d.endpoint = endpoint;
  d.model = "test-model";
  d.dimension = 3;
  d.timeout = std::chrono::milliseconds(2000);
  d.backoff_base = std::chrono::milliseconds(1);
  return d;
}

}  // namespace

TEST_CASE("mock embeddings are deterministic, normalized and token-based", "[providers]") {
  MockEmbedder e(64);
  const auto v = e.embed({"Net income 2019", "net INCOME, 2019!", "", "something else"});
  REQUIRE(v.size() == 4);
  CHECK(v[0].size() == 64);
  CHECK(norm(v[0]) == Catch::Approx(1.0));
  CHECK(v[0] == v[1]);
  CHECK(norm(v[2]) == 0.0);
  CHECK(cosine(v[0], v[2]) == 0.0);
  CHECK(cosine(v[0], v[1]) == Catch::Approx(1.0));
  CHECK(cosine(v[0], v[3]) < 0.5);
  CHECK(e.embed_one("Net income 2019") == v[0]);
}

TEST_CASE("mock embeddings refuse oversized input", "[providers]") {
  MockEmbedder e(8, 4);
  try {
    e.embed({"longer than four"});
    FAIL("expected InputTooLong");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::InputTooLong);
  }
}

TEST_CASE("caching and counting embedders forward faithfully", "[providers]") {
  MockEmbedder mock;
  CountingEmbedder counter(mock);
  CachingEmbedder cache(counter);
  const auto before = embedding_calls_in_process();
  const auto a = cache.embed({"alpha", "beta"});
  const auto b = cache.embed({"beta", "alpha"});
  CHECK(a[0] == b[1]);
  CHECK(a[1] == b[0]);
  CHECK(counter.calls() == 1);
  CHECK(counter.texts() == 2);
  CHECK(cache.dimension() == mock.dimension());
  CHECK(embedding_calls_in_process() > before);
}

TEST_CASE("echo completions return the evidence sections", "[providers]") {
  const std::string prompt = "Answer.\n\nFacts:\n[F1] A's B is 1 at 2019\n\nPassages:\n[P1] Some text.\n\nQuestion: q\n";
  EchoCompletion echo;
  EvidenceEchoCompletion evidence;
  const auto a = echo.complete(prompt);
  CHECK(a.rfind("ECHO:", 0) == 0);
  CHECK(a.find("[F1]") != std::string::npos);
  CHECK(a.find("[P1]") == std::string::npos);
  CHECK(evidence.complete(prompt).find("[P1] Some text.") != std::string::npos);
  CHECK(prompt_section(prompt, "Facts:").find("[F1]") != std::string::npos);
  CHECK(prompt_section(prompt, "Missing:").empty());
}

TEST_CASE("scripted completions accept or reject validation prompts", "[providers]") {
  std::string prompt(prompts::kQaValidation);
  prompt = text::replace_all(prompt, "{context}", "\n[1] Acme | Results | 2019 > Sales = 5\n[2] Acme | Results | 2020 > Sales = 6\n");
  ScriptedCompletion accept;
  const auto j = nlohmann::json::parse(accept.complete(prompt));
  CHECK(j.contains("question"));
  CHECK(j.contains("answer"));
  CHECK(accept.calls() == 1);
  ScriptedCompletion reject(ScriptedCompletion::Mode::RejectAll);
  CHECK(nlohmann::json::parse(reject.complete(prompt)).at("reject") == true);
  FailingCompletion failing;
  CHECK_THROWS_AS(failing.complete("x"), Error);
}

TEST_CASE("subject paths parse from one-line hierarchies", "[providers]") {
  CHECK(parse_subject_path(" Hardware > Laptop ") == std::vector<std::string>{"Hardware", "Laptop"});
  CHECK(parse_subject_path("Acme") == std::vector<std::string>{"Acme"});
  for (const char* bad : {"", "A >  > B", "line one\nline two", "This is a long sentence that explains the subject at length."}) {
    INFO(bad);
    CHECK_THROWS_AS(parse_subject_path(bad), Error);
  }
  DocumentMetadata meta;
  meta.doc_id = "d";
  meta.entity = "Acme";
  DefaultSubjectExtractor def;
  CHECK(def.extract(meta, "") == std::vector<std::string>{"Acme"});
  meta.entity = "  ";
  CHECK(def.extract(meta, "").empty());
}

TEST_CASE("llm subject extraction falls back on unparseable answers", "[providers]") {
  FixedCompletion prose("The subject of this table is clearly the company itself.\nIt reports yearly.");
  LlmSubjectExtractor llm(prose);
  DocumentMetadata meta;
  meta.doc_id = "d";
  meta.entity = "Acme";
  CHECK(llm.extract(meta, "context") == std::vector<std::string>{"Acme"});
}

TEST_CASE("descriptors and endpoints are validated", "[providers]") {
  auto d = http_descriptor(ProviderKind::Embedding, "https://api.example.com/v1/");
  CHECK_NOTHROW(validate_descriptor(d));
  const auto e = split_endpoint(d.endpoint);
  CHECK(e.scheme_host_port == "https://api.example.com");
  CHECK(e.base_path == "/v1");
  d.dimension.reset();
  CHECK_THROWS_AS(validate_descriptor(d), Error);
  CHECK_THROWS_AS(split_endpoint("api.example.com"), Error);
  CHECK_THROWS_AS(split_endpoint("ftp://host"), Error);
  CHECK_THROWS_AS(split_endpoint("https://"), Error);
}

TEST_CASE("request bodies follow the openai-compatible schema", "[http]") {
  const auto e = nlohmann::json::parse(embeddings_request_body("m", {"a", "b"}));
  CHECK(e.at("model") == "m");
  CHECK(e.at("input") == nlohmann::json({"a", "b"}));
  const auto c = nlohmann::json::parse(chat_request_body("m", "hello"));
  CHECK(c.at("messages").at(0).at("role") == "user");
  CHECK(c.at("messages").at(0).at("content") == "hello");
}

TEST_CASE("responses parse by index and reject malformed bodies", "[http]") {
  const auto v = parse_embeddings_response(
      R"({"data":[{"index":1,"embedding":[0,1]},{"index":0,"embedding":[1,0]}]})", 2);
  CHECK(v[0] == Embedding{1, 0});
  CHECK(v[1] == Embedding{0, 1});
  CHECK_THROWS_AS(parse_embeddings_response(R"({"data":[{"index":0,"embedding":[1]}]})", 2), Error);
  CHECK_THROWS_AS(parse_embeddings_response("not json", 1), Error);
  CHECK(parse_chat_response(R"({"choices":[{"message":{"content":"hi"}}]})") == "hi");
  try {
    parse_chat_response(R"({"choices":[{"message":{"content":"  "}}]})");
    FAIL("expected EmptyCompletion");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::EmptyCompletion);
  }
  try {
    parse_chat_response(R"({"nothing":1})");
    FAIL("expected ProviderFailure");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::ProviderFailure);
  }
}

TEST_CASE("http providers talk to a local endpoint with retries", "[http]") {
  FakeServer server;
  ::setenv("SATRAG_TEST_KEY", "sekrit", 1);
  auto d = http_descriptor(ProviderKind::Embedding, server.endpoint());
  d.api_key_env = "SATRAG_TEST_KEY";
  HttpEmbedder embedder(d);

  const auto v = embedder.embed({"a", "b", "c"});
  REQUIRE(v.size() == 3);
  CHECK(v[2] == Embedding{2, 1, 0});
  CHECK(server.last_auth() == "Bearer sekrit");

  server.fail_next(2, 503);
  CHECK(embedder.embed({"a"}).size() == 1);

  server.fail_next(1, 400);
  try {
    embedder.embed({"a"});
    FAIL("expected ProviderFailure");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::ProviderFailure);
  }

  auto wrong_dim = d;
  wrong_dim.dimension = 5;
  HttpEmbedder mismatched(wrong_dim);
  CHECK_THROWS_AS(mismatched.embed({"a"}), Error);

  HttpCompletion chat(http_descriptor(ProviderKind::Completion, server.endpoint()));
  CHECK(chat.complete("ping") == "echo ping");
}

TEST_CASE("unreachable endpoints fail after bounded attempts", "[http]") {
  auto d = http_descriptor(ProviderKind::Completion, "http://127.0.0.1:1");
  d.max_attempts = 2;
  d.timeout = std::chrono::milliseconds(200);
  HttpCompletion chat(d);
  try {
    chat.complete("ping");
    FAIL("expected ProviderFailure");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::ProviderFailure);
  }
}
