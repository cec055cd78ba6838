#pragma once

#include <optional>
#include <span>
#include <vector>

#include "netweave/network.hpp"

namespace netweave {

// Clustering, components, path length and modularity are all computed on the
// undirected projection (u~v iff u->v or v->u); "connected" means weakly connected.

/// |E| / (n(n-1)). Throws UsageError when n < 2.
double density(const DirectedNetwork& g);

/// Mean local clustering coefficient; nodes with projected degree < 2 count as 0.
double avg_clustering(const DirectedNetwork& g);

/// Size of the largest weakly connected component divided by n.
double lcc_proportion(const DirectedNetwork& g);

/// Node ids of the largest weakly connected component, ascending. Ties go to
/// the component holding the smallest node id.
std::vector<NodeId> largest_component(const DirectedNetwork& g);

/// Mean shortest-path length over unordered pairs inside the largest component.
/// Empty when that component has fewer than 2 nodes.
std::optional<double> avg_path(const DirectedNetwork& g);

struct ModularityResult {
  double q = 0.0;
  /// Community label per node, numbered 0.. in order of first appearance.
  std::vector<std::size_t> community;
};

/// Greedy agglomerative (CNM) modularity maximization followed by local
/// refinement. Merges the adjacent community pair with the largest gain until
/// no merge improves Q, then moves single vertices between communities and
/// merges again while Q strictly increases. The same local search is also run
/// from singletons under a few fixed vertex orders and the best partition is
/// kept. Deterministic. Empty when the graph has no edges.
std::optional<ModularityResult> modularity(const DirectedNetwork& g);

/// Modularity of a given partition of the undirected projection.
/// Throws UsageError when the graph has no edges or labels are missing.
double partition_modularity(const DirectedNetwork& g, std::span<const std::size_t> community);

/// |E1 symmetric-difference E2| / (n(n-1)). Throws UsageError on node-count mismatch.
double edge_distance(const DirectedNetwork& a, const DirectedNetwork& b);

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F1(x) - F2(x)|.
/// Throws UsageError if either sample is empty.
double ks_statistic(std::span<const int> a, std::span<const int> b);

/// Undirected-projection degrees, ascending.
std::vector<int> degree_sequence(const DirectedNetwork& g);

struct MetricsReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double density = 0.0;
  double avg_clustering = 0.0;
  double lcc = 0.0;
  std::optional<double> avg_path;
  std::optional<double> modularity;
  std::vector<int> degree_sequence;
};

MetricsReport compute_metrics(const DirectedNetwork& g);

}  // namespace netweave
