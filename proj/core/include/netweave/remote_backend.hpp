#pragma once

#include <atomic>
#include <chrono>
#include <mutex>
#include <string>
#include <string_view>

#include "netweave/backend.hpp"

namespace netweave {

struct RemoteConfig {
  /// Base URL such as "https://api.example.com/v1"; requests go to
  /// <base>/chat/completions.
  std::string base_url;
  std::string api_key;
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
  std::chrono::milliseconds connect_timeout{std::chrono::seconds(10)};
  /// Client-side rate limit; 0 disables it.
  double requests_per_minute = 60.0;
  std::size_t max_tokens = 8192;

  /// Reads NETWEAVE_API_BASE and NETWEAVE_API_KEY. Throws UsageError when the
  /// base URL is unset.
  static RemoteConfig from_environment();
};

/// Blocking token bucket shared by all callers of one client.
class TokenBucket {
 public:
  /// `per_minute` <= 0 means unlimited. Burst capacity is max(1, per_minute / 60).
  explicit TokenBucket(double per_minute);

  void acquire();

 private:
  using Clock = std::chrono::steady_clock;
  std::mutex mutex_;
  double rate_per_second_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
};

/// JSON chat-completions request body: model, messages (one user message
/// holding the prompt verbatim), temperature, max_tokens, and seed when hinted.
std::string chat_request_body(const BackendRequest& request, std::size_t max_tokens);

/// Extracts choices[0].message.content. Throws ProtocolError naming the first
/// missing or mistyped field. `truncated` is set when finish_reason is "length".
std::string parse_chat_response(std::string_view body, bool* truncated = nullptr);

/// Chat-completions client over HTTP(S). Safe to share across threads; each
/// call opens its own connection and only the token bucket is synchronized.
class RemoteBackend final : public TextBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);

  /// 401/403 -> AuthError, 429 -> RateLimitError (with Retry-After when sent),
  /// timeout or connection failure -> TransportError, other non-2xx ->
  /// HttpStatusError, malformed body -> ProtocolError.
  std::string complete(const BackendRequest& request) override;

  std::size_t request_count() const noexcept { return requests_.load(); }

 private:
  RemoteConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  TokenBucket bucket_;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace netweave
