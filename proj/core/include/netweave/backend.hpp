#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "netweave/network.hpp"
#include "netweave/persona.hpp"

namespace netweave {

enum class PromptMode {
  Ego,        // one persona picks friends among candidates (sequential, local)
  Global,     // the whole edge set in one response
  Iterative,  // revise a current edge set
};

/// Structured description of what a prompt asks for. Generators attach it to
/// every request; remote backends ignore it, the mock answers from it.
struct PromptContext {
  PromptMode mode = PromptMode::Ego;
  const Roster* roster = nullptr;
  std::optional<PersonaId> ego;
  std::vector<PersonaId> candidates;  // ascending
  std::vector<Edge> current_edges;    // iterative only
  std::size_t round = 0;
  bool include_reason = false;
};

struct BackendRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.8;
  std::optional<std::uint64_t> seed_hint;
  std::optional<PromptContext> context;
};

/// A text-generation service. Implementations must allow concurrent calls.
class TextBackend {
 public:
  virtual ~TextBackend() = default;

  /// Returns the completion text. Throws a BackendError subclass on failure;
  /// callers own retries.
  virtual std::string complete(const BackendRequest& request) = 0;
};

struct RetryPolicy {
  std::size_t max_retries = 3;
  /// Wait before retrying a transport or server error; doubles per attempt.
  std::chrono::milliseconds backoff{500};
  /// Upper bound on a server-requested Retry-After wait.
  std::chrono::milliseconds max_retry_after{std::chrono::seconds(60)};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Calls `backend` up to 1 + max_retries times. Rate-limit errors wait for the
/// server's Retry-After (or the backoff when absent); auth and protocol errors
/// are rethrown at once. `attempts` receives the number of calls made.
std::string complete_with_retry(TextBackend& backend, const BackendRequest& request,
                                const RetryPolicy& policy, std::size_t* attempts = nullptr,
                                const Sleeper& sleep = {});

}  // namespace netweave
