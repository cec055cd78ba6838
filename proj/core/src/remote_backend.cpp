#include "netweave/remote_backend.hpp"

#include <cstdlib>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "log.hpp"
#include "netweave/errors.hpp"

namespace netweave {

RemoteConfig RemoteConfig::from_environment() {
  RemoteConfig c;
  const char* base = std::getenv("NETWEAVE_API_BASE");
  if (base == nullptr || *base == '\0') {
    throw UsageError("NETWEAVE_API_BASE is not set; the remote backend needs an endpoint");
  }
  c.base_url = base;
  if (const char* key = std::getenv("NETWEAVE_API_KEY")) c.api_key = key;
  return c;
}

TokenBucket::TokenBucket(double per_minute)
    : rate_per_second_(per_minute / 60.0),
      capacity_(std::max(1.0, per_minute / 60.0)),
      tokens_(capacity_),
      last_(Clock::now()) {}

void TokenBucket::acquire() {
  if (rate_per_second_ <= 0.0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = Clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_second_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_per_second_;
    // Holding the lock while sleeping keeps waiters in arrival order.
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

std::string chat_request_body(const BackendRequest& request, std::size_t max_tokens) {
  nlohmann::json body = {
      {"model", request.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", max_tokens},
  };
  if (request.seed_hint) body["seed"] = *request.seed_hint;
  return body.dump();
}

std::string parse_chat_response(std::string_view body, bool* truncated) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(fmt::format("response body is not JSON: {}", e.what()));
  }
  if (!j.is_object() || !j.contains("choices")) {
    throw ProtocolError("response is missing field 'choices'");
  }
  const auto& choices = j.at("choices");
  if (!choices.is_array() || choices.empty()) {
    throw ProtocolError("response field 'choices' is not a non-empty array");
  }
  const auto& first = choices.at(0);
  if (!first.is_object() || !first.contains("message")) {
    throw ProtocolError("response is missing field 'choices[0].message'");
  }
  const auto& message = first.at("message");
  if (!message.is_object() || !message.contains("content")) {
    throw ProtocolError("response is missing field 'choices[0].message.content'");
  }
  if (!message.at("content").is_string()) {
    throw ProtocolError("response field 'choices[0].message.content' is not a string");
  }
  if (truncated != nullptr) {
    *truncated = first.contains("finish_reason") && first.at("finish_reason") == "length";
  }
  return message.at("content").get<std::string>();
}

namespace {

std::optional<std::chrono::milliseconds> parse_retry_after(const std::string& value) {
  if (value.empty()) return std::nullopt;
  char* end = nullptr;
  const double seconds = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || seconds < 0.0) return std::nullopt;  // HTTP-date form unsupported
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

template <class Duration>
void split_duration(Duration d, time_t& sec, time_t& usec) {
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(d).count();
  sec = static_cast<time_t>(us / 1000000);
  usec = static_cast<time_t>(us % 1000000);
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig config)
    : config_(std::move(config)), bucket_(config_.requests_per_minute) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, url_re)) {
    throw UsageError(fmt::format("invalid API base URL '{}'", config_.base_url));
  }
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].matched ? m[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme_host_port_.rfind("https://", 0) == 0) {
    throw UsageError("this build has no TLS support; use an http:// API base");
  }
#endif
}

std::string RemoteBackend::complete(const BackendRequest& request) {
  if (request.prompt.empty()) throw UsageError("backend request has an empty prompt");
  bucket_.acquire();
  ++requests_;

  httplib::Client client(scheme_host_port_);
  time_t sec = 0;
  time_t usec = 0;
  split_duration(config_.connect_timeout, sec, usec);
  client.set_connection_timeout(sec, usec);
  split_duration(config_.timeout, sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  if (!config_.api_key.empty()) client.set_bearer_token_auth(config_.api_key);

  const std::string body = chat_request_body(request, config_.max_tokens);
  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path_prefix_ + "/chat/completions", body, "application/json");
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= config_.timeout * 9 / 10);
    throw TransportError(timed_out, fmt::format("request to {} failed: {}{}", scheme_host_port_,
                                                httplib::to_string(err),
                                                timed_out ? " (timeout)" : ""));
  }
  const int status = res->status;
  if (status == 401 || status == 403) {
    throw AuthError(status, fmt::format("authentication rejected (HTTP {})", status));
  }
  if (status == 429) {
    const auto retry_after = parse_retry_after(res->get_header_value("Retry-After"));
    throw RateLimitError(retry_after, "rate limited (HTTP 429)");
  }
  if (status < 200 || status >= 300) {
    throw HttpStatusError(status, fmt::format("unexpected HTTP status {}", status));
  }
  bool truncated = false;
  std::string text = parse_chat_response(res->body, &truncated);
  if (truncated) {
    detail::log().warn("completion for model {} hit the max_tokens cap ({}) and was truncated",
                       request.model, config_.max_tokens);
  }
  return text;
}

}  // namespace netweave
