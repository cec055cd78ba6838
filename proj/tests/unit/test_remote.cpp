#include <doctest.h>

#include <cstdlib>

#include <json.hpp>

#include "fixtures.hpp"
#include "netweave/errors.hpp"
#include "netweave/generate.hpp"
#include "netweave/remote_backend.hpp"
#include "stub_server.hpp"

using namespace netweave;
using namespace std::chrono_literals;
using fixture::StubServer;

namespace {

RemoteConfig config_for(const StubServer& s) {
  RemoteConfig c;
  c.base_url = s.base_url();
  c.api_key = "sk-test";
  c.requests_per_minute = 0;
  c.timeout = 2000ms;
  return c;
}

BackendRequest request(std::string prompt) {
  BackendRequest r;
  r.model = "gpt-4.1-mini";
  r.prompt = std::move(prompt);
  r.temperature = 0.8;
  return r;
}

}  // namespace

TEST_CASE("request body carries the prompt verbatim") {
  BackendRequest r = request("Line one\n  «ünïcode» \"quoted\"\t\n");
  r.seed_hint = 42;
  const auto j = nlohmann::json::parse(chat_request_body(r, 1024));
  CHECK(j["model"] == "gpt-4.1-mini");
  CHECK(j["messages"].size() == 1);
  CHECK(j["messages"][0]["role"] == "user");
  CHECK(j["messages"][0]["content"] == r.prompt);
  CHECK(j["temperature"] == 0.8);
  CHECK(j["max_tokens"] == 1024);
  CHECK(j["seed"] == 42);
  r.seed_hint.reset();
  CHECK(!nlohmann::json::parse(chat_request_body(r, 1)).contains("seed"));
}

TEST_CASE("response parsing names the broken field") {
  bool truncated = true;
  CHECK(parse_chat_response(StubServer::chat_body("hello"), &truncated) == "hello");
  CHECK(!truncated);
  CHECK(parse_chat_response(StubServer::chat_body("cut", "length"), &truncated) == "cut");
  CHECK(truncated);
  auto message_of = [](std::string_view body) {
    try {
      parse_chat_response(body);
    } catch (const ProtocolError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of("{}").find("'choices'") != std::string::npos);
  CHECK(message_of(R"({"choices": []})").find("'choices'") != std::string::npos);
  CHECK(message_of(R"({"choices": [{}]})").find("'choices[0].message'") != std::string::npos);
  CHECK(message_of(R"({"choices": [{"message": {}}]})").find("'choices[0].message.content'") !=
        std::string::npos);
  CHECK(message_of(R"({"choices": [{"message": {"content": 3}}]})").find("not a string") !=
        std::string::npos);
  CHECK(message_of("<html>").find("not JSON") != std::string::npos);
}

TEST_CASE("round trip through a local endpoint") {
  StubServer server;
  server.push({200, StubServer::chat_body("- Ann Lee\n"), {}, {}});
  RemoteBackend backend(config_for(server));
  const std::string prompt = "You are Sam.\nPick friends:\n1. Ann Lee\n";
  CHECK(backend.complete(request(prompt)) == "- Ann Lee\n");
  REQUIRE(server.bodies().size() == 1);
  const auto sent = nlohmann::json::parse(server.bodies()[0]);
  CHECK(sent["messages"][0]["content"].get<std::string>() == prompt);
  CHECK(server.auth_headers()[0] == "Bearer sk-test");
  CHECK(backend.request_count() == 1);
}

TEST_CASE("status codes map to error types") {
  StubServer server;
  RemoteBackend backend(config_for(server));
  server.push({401, "{}", {}, {}});
  try {
    backend.complete(request("x"));
    FAIL("expected AuthError");
  } catch (const AuthError& e) {
    CHECK(e.status() == 401);
  }
  server.push({429, "{}", {{"Retry-After", "3"}}, {}});
  try {
    backend.complete(request("x"));
    FAIL("expected RateLimitError");
  } catch (const RateLimitError& e) {
    CHECK(e.retry_after() == std::optional<std::chrono::milliseconds>{3000ms});
  }
  server.push({429, "{}", {}, {}});
  try {
    backend.complete(request("x"));
    FAIL("expected RateLimitError");
  } catch (const RateLimitError& e) {
    CHECK(!e.retry_after().has_value());
  }
  server.push({502, "bad gateway", {}, {}});
  try {
    backend.complete(request("x"));
    FAIL("expected HttpStatusError");
  } catch (const HttpStatusError& e) {
    CHECK(e.status() == 502);
  }
  server.push({200, R"({"choices": [{"message": {}}]})", {}, {}});
  CHECK_THROWS_AS(backend.complete(request("x")), ProtocolError);
}

TEST_CASE("a slow server times out") {
  StubServer server;
  server.push({200, StubServer::chat_body("late"), {}, 1500ms});
  RemoteConfig c = config_for(server);
  c.timeout = 300ms;
  RemoteBackend backend(c);
  try {
    backend.complete(request("x"));
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(e.timed_out());
  }
}

TEST_CASE("a closed port is a transport error") {
  RemoteConfig c;
  c.base_url = "http://127.0.0.1:1/v1";
  c.requests_per_minute = 0;
  c.connect_timeout = 500ms;
  RemoteBackend backend(c);
  CHECK_THROWS_AS(backend.complete(request("x")), TransportError);
}

TEST_CASE("bad base URLs and empty prompts are usage errors") {
  RemoteConfig c;
  c.base_url = "ftp://example";
  CHECK_THROWS_AS(RemoteBackend{c}, UsageError);
  StubServer server;
  RemoteBackend backend(config_for(server));
  CHECK_THROWS_AS(backend.complete(request("")), UsageError);
}

TEST_CASE("retry wrapper recovers from a rate limit") {
  StubServer server;
  server.push({429, "{}", {{"Retry-After", "0.05"}}, {}});
  server.push({200, StubServer::chat_body("ok"), {}, {}});
  RemoteBackend backend(config_for(server));
  std::size_t attempts = 0;
  CHECK(complete_with_retry(backend, request("x"), {}, &attempts) == "ok");
  CHECK(attempts == 2);
}

TEST_CASE("token bucket spaces requests") {
  TokenBucket unlimited(0);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 1000; ++i) unlimited.acquire();
  CHECK(std::chrono::steady_clock::now() - t0 < 500ms);

  // 600/min: burst of 10, then one every 100 ms.
  TokenBucket bucket(600);
  const auto t1 = std::chrono::steady_clock::now();
  for (int i = 0; i < 13; ++i) bucket.acquire();
  const auto elapsed = std::chrono::steady_clock::now() - t1;
  CHECK(elapsed >= 250ms);
  CHECK(elapsed < 1500ms);
}

TEST_CASE("environment configuration") {
  ::setenv("NETWEAVE_API_BASE", "http://localhost:9/v1", 1);
  ::setenv("NETWEAVE_API_KEY", "k", 1);
  const auto c = RemoteConfig::from_environment();
  CHECK(c.base_url == "http://localhost:9/v1");
  CHECK(c.api_key == "k");
  ::unsetenv("NETWEAVE_API_BASE");
  CHECK_THROWS_AS(RemoteConfig::from_environment(), UsageError);
}

TEST_CASE("sequential generation over HTTP sends the rendered prompts") {
  StubServer server;
  const Roster r = fixture::canonical_roster();
  server.set_fallback({200, StubServer::chat_body("- " + r[0].name + "\n"), {}, {}});
  RemoteBackend backend(config_for(server));
  GenerationConfig c;
  c.model = "gpt-4.1-mini";
  c.parallelism = 4;
  const auto tpl = fixture::bare_template(Method::Sequential);
  const auto res = generate_sequential(backend, r, tpl, c);
  // Ego 0 is offered only itself, which never parses: 1 + 3 retries.
  CHECK(res.network.edge_count() == 49);
  const auto bodies = server.bodies();
  REQUIRE(bodies.size() == 53);
  std::set<std::string> sent;
  for (const auto& b : bodies) sent.insert(nlohmann::json::parse(b)["messages"][0]["content"]);
  for (const auto& call : res.transcript.calls) CHECK(sent.count(call.prompt) == 1);
}
