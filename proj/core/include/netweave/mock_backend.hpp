#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "netweave/backend.hpp"

namespace netweave {

/// Homophily-weighted nomination rule.
///
/// Candidate j scores base_logit + sum_a w_a * [same group on a] plus
/// noise * u, where u in [0, 1) is a hash of (seed, request seed hint, ego, j).
/// The top out_degree_target candidates are nominated, ties to the lower id.
struct MockPolicy {
  std::map<Attribute, double> weights;
  double base_logit = 0.0;
  std::size_t out_degree_target = 5;
  std::uint64_t seed = 0;
  double noise = 0.0;
};

enum class IterativeRule {
  Echo,            // return the current edges unchanged
  Clear,           // return no edges
  TriadicClosure,  // add (i, k) whenever (i, j) and (j, k) exist
  Refine,          // re-pick each source's friends, favoring current and two-hop ties
};

std::string_view iterative_rule_name(IterativeRule r) noexcept;
IterativeRule iterative_rule_from_name(std::string_view name);

struct MockConfig {
  MockPolicy ego;     // sequential and local calls, and per-source choice under Refine
  MockPolicy global;  // global calls
  IterativeRule iterative = IterativeRule::Refine;
  double closure_weight = 0.5;  // Refine bonus for current and two-hop targets
};

/// Default offline policy: ego calls weight politics, global calls weight age
/// bracket, iterative rounds refine toward politics with a closure bonus.
MockConfig signature_mock_config();

/// JSON object with optional keys "ego", "global" (each {"weights": {attr: w},
/// "base_logit", "out_degree", "seed", "noise"}), "iterative", "closure_weight".
/// Missing keys keep the signature defaults. Throws ParseError.
MockConfig parse_mock_config(std::string_view json_text);
MockConfig load_mock_config(const std::filesystem::path& path);

/// Deterministic response for a prompt context, in the same line formats the
/// prompts ask real models for. Pure: identical inputs give identical text.
std::string mock_complete(const MockConfig& config, const PromptContext& context,
                          std::optional<std::uint64_t> seed_hint);

/// Ego-mode selection on its own, for tests and oracles.
std::vector<PersonaId> mock_select(const MockPolicy& policy, const Roster& roster,
                                   PersonaId ego, std::span<const PersonaId> candidates,
                                   std::optional<std::uint64_t> seed_hint);

class MockBackend final : public TextBackend {
 public:
  explicit MockBackend(MockConfig config = signature_mock_config()) : config_(std::move(config)) {}

  /// Throws ProtocolError when the request carries no prompt context.
  std::string complete(const BackendRequest& request) override;

  const MockConfig& config() const noexcept { return config_; }
  std::size_t call_count() const noexcept { return calls_.load(); }

 private:
  MockConfig config_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace netweave
