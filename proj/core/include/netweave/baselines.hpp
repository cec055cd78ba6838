#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netweave/metrics.hpp"
#include "netweave/network.hpp"

namespace netweave {

// The classical generators produce undirected structure. Each undirected edge
// {u, v} is stored as the two directed edges u->v and v->u, so directed density
// equals undirected density and all projection-based metrics see the intended
// graph.

/// Erdos-Renyi: each unordered pair joined independently with probability p.
DirectedNetwork generate_er(std::size_t n, double p, std::uint64_t seed);

/// Barabasi-Albert: an m-node seed clique, then each arriving node attaches to
/// m distinct existing nodes with probability proportional to degree.
/// Requires 1 <= m < n.
DirectedNetwork generate_ba(std::size_t n, std::size_t m, std::uint64_t seed);

/// Watts-Strogatz: ring lattice with k_ring nearest neighbors, each lattice
/// edge rewired with probability beta to a uniform non-duplicate target.
/// Requires k_ring even, k_ring < n, 0 <= beta <= 1.
DirectedNetwork generate_ws(std::size_t n, std::size_t k_ring, double beta, std::uint64_t seed);

enum class BaselineFamily { ER, BA, WS };
inline constexpr BaselineFamily kAllFamilies[] = {BaselineFamily::ER, BaselineFamily::BA,
                                                  BaselineFamily::WS};

std::string_view family_name(BaselineFamily f) noexcept;  // "ER", "BA", "WS"
BaselineFamily family_from_name(std::string_view name);   // case-insensitive

struct CalibrationTarget {
  std::size_t n = 50;
  double density = 0.19;
  std::vector<std::uint64_t> seeds;
};

struct BaselineParams {
  BaselineFamily family = BaselineFamily::ER;
  double p = 0.0;           // ER
  std::size_t m = 0;        // BA
  std::size_t k_ring = 0;   // WS
  double beta = 0.1;        // WS
  double mean_density = 0.0;  // achieved over the target's seeds
};

/// Density-matched parameters: ER p = density; BA m = round(density(n-1)/2)
/// clipped to [1, n-1); WS k_ring = nearest even to density(n-1). Throws
/// CalibrationError when the family cannot reach the target or the mean
/// achieved density over the seeds misses it by more than 10%.
BaselineParams calibrate(const CalibrationTarget& target, BaselineFamily family,
                         double ws_beta = 0.1);

DirectedNetwork generate_baseline(const BaselineParams& params, std::size_t n,
                                  std::uint64_t seed);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;  // seeds where the metric was defined
};

/// Mean and standard error (sample sd / sqrt(count)) of the defined values.
MeanStderr summarize(std::span<const double> values);

struct FamilySuite {
  BaselineParams params;
  std::vector<std::uint64_t> seeds;
  std::vector<MetricsReport> reports;  // one per seed
  std::map<std::string, MeanStderr> summary;  // keyed by metric name
};

/// Metric names used in FamilySuite::summary, in output order.
std::span<const std::string_view> suite_metric_names() noexcept;

/// Generates every requested family at calibrated parameters for each seed and
/// aggregates the metrics. Requires at least 2 seeds.
std::vector<FamilySuite> baseline_suite(const CalibrationTarget& target,
                                        std::span<const BaselineFamily> families,
                                        double ws_beta = 0.1, std::size_t parallelism = 1);

/// Per-seed rows: family, seed, then every MetricsReport field.
void write_suite_csv(std::ostream& out, std::span<const FamilySuite> suites);
/// One row per (family, metric): family, metric, mean, stderr, count.
void write_suite_summary_csv(std::ostream& out, std::span<const FamilySuite> suites);

}  // namespace netweave
