#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "netweave/network.hpp"
#include "netweave/persona.hpp"

namespace netweave {

struct TieNomination {
  PersonaId source = 0;
  PersonaId target = 0;
  std::optional<std::string> reason;

  bool operator==(const TieNomination&) const = default;
};

struct ParseTally {
  std::size_t accepted = 0;
  std::size_t unknown_names = 0;     // list lines naming nobody on the roster
  std::size_t self_references = 0;
  std::size_t outside_allowed = 0;   // real persona, but not a permitted target
  std::size_t duplicates = 0;

  std::size_t rejected() const noexcept {
    return unknown_names + self_references + outside_allowed + duplicates;
  }
};

struct ParseResult {
  std::vector<TieNomination> nominations;
  ParseTally tally;
  std::vector<std::string> rejections;  // one human-readable entry per rejected item
  /// The response was blank or literally "none".
  bool explicit_empty = false;
  /// Non-empty text that yielded no valid nomination; callers retry on this.
  bool soft_failure = false;
};

/// Finds roster names in free text: case-insensitive, whitespace-normalized,
/// whole-word, longest match first.
class NameMatcher {
 public:
  explicit NameMatcher(const Roster& roster);

  struct Match {
    PersonaId id = 0;
    std::size_t begin = 0;  // byte offsets into the original text
    std::size_t end = 0;
  };

  std::vector<Match> find_all(std::string_view text) const;

 private:
  std::vector<std::pair<std::string, PersonaId>> names_;  // normalized, longest first
};

/// Parses an ego's nominations. Accepts the `- Full Name[: reason]` list
/// format and, as a fallback, names mentioned anywhere in prose. Rejects
/// unknown list entries, the ego itself, and targets outside `allowed`
/// individually; duplicates are dropped. Reasons are captured only when
/// `include_reason` is set.
ParseResult parse_response(std::string_view text, PersonaId ego,
                           const std::set<PersonaId>& allowed, const Roster& roster,
                           bool include_reason);

/// Parses a whole-network response of `Source -> Target[, Target...][: reason]`
/// lines. Lines that look like edges but do not name two roster members count
/// as unknown names.
ParseResult parse_edge_list(std::string_view text, const Roster& roster, bool include_reason);

}  // namespace netweave
