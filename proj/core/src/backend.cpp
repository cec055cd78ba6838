#include "netweave/backend.hpp"

#include <thread>

#include "log.hpp"
#include "netweave/errors.hpp"

namespace netweave {

std::string complete_with_retry(TextBackend& backend, const BackendRequest& request,
                                const RetryPolicy& policy, std::size_t* attempts,
                                const Sleeper& sleep) {
  const Sleeper wait = sleep ? sleep : [](std::chrono::milliseconds d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
  };
  std::chrono::milliseconds backoff = policy.backoff;
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempts != nullptr) *attempts = attempt + 1;
    try {
      return backend.complete(request);
    } catch (const AuthError&) {
      throw;
    } catch (const ProtocolError&) {
      throw;
    } catch (const RateLimitError& e) {
      if (attempt >= policy.max_retries) throw;
      const auto delay = std::min(e.retry_after().value_or(backoff), policy.max_retry_after);
      detail::log().warn("rate limited; retrying in {} ms", delay.count());
      wait(delay);
    } catch (const BackendError& e) {
      if (attempt >= policy.max_retries) throw;
      detail::log().warn("backend error ({}); retrying in {} ms", e.what(), backoff.count());
      wait(backoff);
      backoff *= 2;
    }
  }
}

}  // namespace netweave
