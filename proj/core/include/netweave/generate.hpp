#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "netweave/backend.hpp"
#include "netweave/errors.hpp"
#include "netweave/network.hpp"
#include "netweave/parse.hpp"
#include "netweave/persona.hpp"
#include "netweave/prompt.hpp"

namespace netweave {

struct GenerationConfig {
  std::string model = "mock";
  std::size_t k = 12;       // local neighborhood size
  std::size_t rounds = 3;   // iterative refinement rounds
  double temperature = 0.8;
  std::uint64_t seed = 0;
  bool include_reason = false;
  RetryPolicy retry;
  /// Concurrent backend calls for per-persona methods.
  std::size_t parallelism = 1;
  /// Order in which egos are prompted; empty means ascending id. Does not
  /// affect the result.
  std::vector<PersonaId> processing_order;
  bool record_prompts = true;

  /// Throws UsageError when a parameter is out of range for `method` on a
  /// roster of `n` personas.
  void validate(Method method, std::size_t n) const;
};

struct CallRecord {
  std::string kind;  // "ego", "global" or "round"
  std::optional<PersonaId> ego;
  std::optional<std::size_t> round;
  std::string prompt;
  std::vector<std::string> responses;  // one per attempt; failures as "error: ..."
  ParseTally tally;
  std::vector<std::string> rejections;
  std::string outcome;  // "ok", "empty", "no_valid_nominations", "rejected", "error"
};

/// Everything a generation run did, for provenance and later reason analysis.
struct Transcript {
  std::map<std::string, std::string> labels;  // condition fields, config provenance
  std::string method;
  std::string model;
  std::uint64_t seed = 0;
  double temperature = 0.0;
  bool include_reason = false;
  std::vector<CallRecord> calls;
  /// Iterative runs: E(0) .. E(T). Empty for other methods.
  std::vector<std::vector<Edge>> edge_sets;
  /// Accepted nominations of the final network, with reasons when requested.
  std::vector<TieNomination> nominations;
};

std::string transcript_to_json(const Transcript& t);
Transcript transcript_from_json(std::string_view text);

/// A backend kept failing after retries, or a joint response never parsed.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, Transcript transcript,
                  std::optional<DirectedNetwork> last_valid = std::nullopt)
      : Error(what), transcript_(std::move(transcript)), last_valid_(std::move(last_valid)) {}

  const Transcript& transcript() const noexcept { return transcript_; }
  /// Iterative runs: the last edge set that parsed.
  const std::optional<DirectedNetwork>& last_valid() const noexcept { return last_valid_; }

 private:
  Transcript transcript_;
  std::optional<DirectedNetwork> last_valid_;
};

struct GenerationResult {
  DirectedNetwork network;
  Transcript transcript;
};

/// One call per persona over everyone else; the network is the union of the
/// parsed nominations. A persona whose responses never parse contributes no
/// edges.
GenerationResult generate_sequential(TextBackend& backend, const Roster& roster,
                                     const PromptTemplate& tpl, const GenerationConfig& config);

/// One call for the whole edge set. Any rejected line voids the response and
/// the call is retried; there is no partial fallback.
GenerationResult generate_global(TextBackend& backend, const Roster& roster,
                                 const PromptTemplate& tpl, const GenerationConfig& config);

/// One call per persona over a random neighborhood of size k.
GenerationResult generate_local(TextBackend& backend, const Roster& roster,
                                const PromptTemplate& tpl, const GenerationConfig& config);

/// Starts from generate_sequential with `seq_tpl`, then runs `config.rounds`
/// revisions, each replacing the whole edge set. Zero rounds returns E(0).
GenerationResult generate_iterative(TextBackend& backend, const Roster& roster,
                                    const PromptTemplate& seq_tpl, const PromptTemplate& iter_tpl,
                                    const GenerationConfig& config);

/// The k personas shown to `ego` by the local method: uniform without
/// replacement from everyone else, seeded by (seed, ego) alone. Ascending.
std::vector<PersonaId> local_neighborhood(std::size_t n, PersonaId ego, std::size_t k,
                                          std::uint64_t seed);

struct VerificationReport {
  bool passed = true;
  std::vector<std::string> violations;
};

/// Checks a raw edge list against a roster: endpoints in range, no self-loops,
/// no duplicates.
VerificationReport verify_edges(std::span<const Edge> edges, const Roster& roster);
VerificationReport verify_network(const DirectedNetwork& g, const Roster& roster);

}  // namespace netweave
