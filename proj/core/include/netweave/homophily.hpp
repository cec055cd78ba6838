#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "netweave/network.hpp"
#include "netweave/persona.hpp"

namespace netweave {

enum class HomophilyStatus {
  Defined,
  EmptyNetwork,  // no edges, so the same-group share is undefined
  ZeroBaseline,  // every group is a singleton, so the ratio is undefined
};

std::string_view homophily_status_name(HomophilyStatus s) noexcept;

/// Baseline / inbreeding decomposition for one attribute.
///
/// `baseline` is the probability that a uniformly random ordered pair of
/// distinct personas shares the attribute. `raw_share` is the fraction of
/// edges whose endpoints share it, and `ratio = raw_share / baseline`.
/// A ratio of 1 means ties follow roster composition alone.
struct HomophilyReport {
  Attribute attribute = Attribute::Gender;
  HomophilyStatus status = HomophilyStatus::Defined;
  std::uint64_t matching_pairs = 0;  // ordered distinct pairs sharing the attribute
  std::uint64_t total_pairs = 0;     // n(n-1)
  std::uint64_t matching_edges = 0;
  std::uint64_t edge_count = 0;
  double baseline = 0.0;
  double raw_share = 0.0;  // meaningful unless status == EmptyNetwork
  double ratio = 0.0;      // meaningful only when status == Defined

  bool defined() const noexcept { return status == HomophilyStatus::Defined; }
};

/// Ordered pairs (i, j), i != j, that share `attribute`. Categorical
/// attributes use group sizes; interests are enumerated pair by pair.
std::uint64_t matching_pair_count(const Roster& roster, Attribute attribute);

/// matching_pair_count / (n(n-1)). Zero when every group is a singleton.
/// Throws UsageError when the roster has fewer than 2 personas.
double baseline_probability(const Roster& roster, Attribute attribute);

/// Throws UsageError when the network and roster sizes differ.
HomophilyReport same_group_ratio(const DirectedNetwork& g, const Roster& roster,
                                 Attribute attribute);

/// One report per attribute, in kAllAttributes order. Undefined entries are
/// flagged individually rather than aborting the profile.
std::vector<HomophilyReport> homophily_profile(const DirectedNetwork& g, const Roster& roster);

/// CSV rows `network,attribute,baseline,raw_share,ratio,defined`. Undefined
/// values are written as empty fields.
void write_profile_csv(std::ostream& out, std::string_view network_id,
                       std::span<const HomophilyReport> profile, bool with_header);

}  // namespace netweave
