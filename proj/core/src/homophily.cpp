#include "netweave/homophily.hpp"

#include <fmt/format.h>

#include "csv.hpp"
#include "netweave/errors.hpp"

namespace netweave {

std::string_view homophily_status_name(HomophilyStatus s) noexcept {
  switch (s) {
    case HomophilyStatus::Defined: return "defined";
    case HomophilyStatus::EmptyNetwork: return "empty_network";
    case HomophilyStatus::ZeroBaseline: return "zero_baseline";
  }
  return "unknown";
}

std::uint64_t matching_pair_count(const Roster& roster, Attribute attribute) {
  std::uint64_t count = 0;
  if (attribute == Attribute::Interests) {
    const auto people = roster.personas();
    for (std::size_t i = 0; i < people.size(); ++i) {
      for (std::size_t j = i + 1; j < people.size(); ++j) {
        if (people[i].shares(people[j], attribute)) count += 2;
      }
    }
    return count;
  }
  for (const auto& [_, members] : partition(roster, attribute).groups) {
    const std::uint64_t s = members.size();
    count += s * (s - 1);
  }
  return count;
}

double baseline_probability(const Roster& roster, Attribute attribute) {
  const std::uint64_t n = roster.size();
  if (n < 2) throw UsageError("baseline probability needs at least 2 personas");
  return static_cast<double>(matching_pair_count(roster, attribute)) /
         static_cast<double>(n * (n - 1));
}

HomophilyReport same_group_ratio(const DirectedNetwork& g, const Roster& roster,
                                 Attribute attribute) {
  if (g.node_count() != roster.size()) {
    throw UsageError(fmt::format("network has {} nodes but the roster has {} personas",
                                 g.node_count(), roster.size()));
  }
  HomophilyReport r;
  r.attribute = attribute;
  const std::uint64_t n = roster.size();
  r.total_pairs = n * (n - 1);
  r.matching_pairs = matching_pair_count(roster, attribute);
  r.baseline = r.total_pairs == 0 ? 0.0
                                  : static_cast<double>(r.matching_pairs) /
                                        static_cast<double>(r.total_pairs);
  r.edge_count = g.edge_count();
  for (const Edge& e : g.edges()) {
    if (roster[e.source].shares(roster[e.target], attribute)) ++r.matching_edges;
  }
  if (r.edge_count == 0) {
    r.status = HomophilyStatus::EmptyNetwork;
    return r;
  }
  r.raw_share = static_cast<double>(r.matching_edges) / static_cast<double>(r.edge_count);
  if (r.matching_pairs == 0) {
    r.status = HomophilyStatus::ZeroBaseline;
    return r;
  }
  r.ratio = r.raw_share / r.baseline;
  return r;
}

std::vector<HomophilyReport> homophily_profile(const DirectedNetwork& g, const Roster& roster) {
  std::vector<HomophilyReport> out;
  out.reserve(kAllAttributes.size());
  for (Attribute a : kAllAttributes) out.push_back(same_group_ratio(g, roster, a));
  return out;
}

void write_profile_csv(std::ostream& out, std::string_view network_id,
                       std::span<const HomophilyReport> profile, bool with_header) {
  if (with_header) out << "network,attribute,baseline,raw_share,ratio,defined\n";
  for (const auto& r : profile) {
    out << detail::csv_field(network_id) << ',' << attribute_name(r.attribute) << ','
        << detail::csv_number(r.baseline) << ','
        << (r.status == HomophilyStatus::EmptyNetwork ? "" : detail::csv_number(r.raw_share))
        << ',' << (r.defined() ? detail::csv_number(r.ratio) : "") << ','
        << (r.defined() ? "true" : "false") << '\n';
  }
}

}  // namespace netweave
