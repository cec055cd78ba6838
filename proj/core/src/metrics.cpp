#include "netweave/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "netweave/errors.hpp"
#include "netweave/random.hpp"

namespace netweave {

double density(const DirectedNetwork& g) {
  const std::size_t n = g.node_count();
  if (n < 2) throw UsageError("density needs at least 2 nodes");
  return static_cast<double>(g.edge_count()) / static_cast<double>(n * (n - 1));
}

double avg_clustering(const DirectedNetwork& g) {
  const std::size_t n = g.node_count();
  if (n == 0) return 0.0;
  const auto adj = g.undirected_neighbors();
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& nb = adj[v];
    const std::size_t d = nb.size();
    if (d < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < d; ++a) {
      // Count neighbors of nb[a] that are also neighbors of v and come after it.
      const auto& other = adj[nb[a]];
      auto it = std::upper_bound(other.begin(), other.end(), nb[a]);
      std::size_t b = a + 1;
      while (it != other.end() && b < d) {
        if (*it == nb[b]) {
          ++links;
          ++it;
          ++b;
        } else if (*it < nb[b]) {
          ++it;
        } else {
          ++b;
        }
      }
    }
    total += 2.0 * static_cast<double>(links) / static_cast<double>(d * (d - 1));
  }
  return total / static_cast<double>(n);
}

namespace {

std::vector<std::size_t> component_labels(const std::vector<std::vector<NodeId>>& adj) {
  const std::size_t n = adj.size();
  std::vector<std::size_t> label(n, n);
  std::size_t next = 0;
  std::vector<NodeId> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != n) continue;
    label[s] = next;
    stack.assign(1, static_cast<NodeId>(s));
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (NodeId w : adj[v]) {
        if (label[w] == n) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

std::vector<NodeId> largest_of(const std::vector<std::vector<NodeId>>& adj) {
  const auto label = component_labels(adj);
  if (label.empty()) return {};
  const std::size_t k = *std::max_element(label.begin(), label.end()) + 1;
  std::vector<std::size_t> size(k, 0);
  for (auto l : label) ++size[l];
  // Labels are assigned in order of smallest member, so the first maximum wins ties.
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < label.size(); ++v) {
    if (label[v] == best) out.push_back(static_cast<NodeId>(v));
  }
  return out;
}

}  // namespace

std::vector<NodeId> largest_component(const DirectedNetwork& g) {
  return largest_of(g.undirected_neighbors());
}

double lcc_proportion(const DirectedNetwork& g) {
  if (g.node_count() == 0) return 0.0;
  return static_cast<double>(largest_component(g).size()) /
         static_cast<double>(g.node_count());
}

std::optional<double> avg_path(const DirectedNetwork& g) {
  const auto adj = g.undirected_neighbors();
  const auto comp = largest_of(adj);
  if (comp.size() < 2) return std::nullopt;

  const std::size_t n = g.node_count();
  std::vector<int> dist(n);
  std::uint64_t total = 0;
  std::queue<NodeId> q;
  for (NodeId s : comp) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const NodeId v = q.front();
      q.pop();
      for (NodeId w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
      }
    }
    for (NodeId t : comp) {
      if (t > s) total += static_cast<std::uint64_t>(dist[t]);
    }
  }
  const double pairs = static_cast<double>(comp.size()) * static_cast<double>(comp.size() - 1) / 2.0;
  return static_cast<double>(total) / pairs;
}

namespace {

// Local search on a labeling (labels in [0, n)), in the same integer units as
// the greedy pass. Alternates single-vertex moves, including to an empty
// community, with pairwise community merges, taking only strictly positive
// gains, until neither helps.
void refine_partition(const std::vector<std::vector<NodeId>>& adj, std::int64_t m,
                      std::span<const std::size_t> order, std::vector<std::size_t>& label) {
  const std::size_t n = adj.size();
  std::vector<std::int64_t> deg(n, 0);
  for (std::size_t v = 0; v < n; ++v) deg[label[v]] += static_cast<std::int64_t>(adj[v].size());

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v : order) {
      const std::int64_t k = static_cast<std::int64_t>(adj[v].size());
      if (k == 0) continue;
      std::map<std::size_t, std::int64_t> to;
      for (NodeId w : adj[v]) ++to[label[w]];
      const std::size_t from = label[v];
      const std::int64_t k_from = to.count(from) ? to[from] : 0;
      // Moving v from A to B gains 4m(k_B - k_A) - 2k(D_B - D_A + k).
      auto gain = [&](std::size_t target, std::int64_t k_to) {
        return 4 * m * (k_to - k_from) - 2 * k * (deg[target] - deg[from] + k);
      };
      std::int64_t best = 0;
      std::size_t best_c = from;
      for (const auto& [c, k_to] : to) {
        if (c == from) continue;
        const std::int64_t g = gain(c, k_to);
        if (g > best) {
          best = g;
          best_c = c;
        }
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (deg[c] != 0 || c == from) continue;
        // An empty community: only worth it when v is poorly attached.
        if (const std::int64_t g = gain(c, 0); g > best) {
          best = g;
          best_c = c;
        }
        break;
      }
      if (best_c != from) {
        deg[from] -= k;
        deg[best_c] += k;
        label[v] = best_c;
        changed = true;
      }
    }

    std::map<std::pair<std::size_t, std::size_t>, std::int64_t> between;
    for (std::size_t v = 0; v < n; ++v) {
      for (NodeId w : adj[v]) {
        if (w > v && label[v] != label[w]) {
          ++between[{std::min(label[v], label[w]), std::max(label[v], label[w])}];
        }
      }
    }
    std::int64_t best = 0;
    std::pair<std::size_t, std::size_t> pick;
    for (const auto& [cd, l] : between) {
      const std::int64_t g = 4 * m * l - 2 * deg[cd.first] * deg[cd.second];
      if (g > best) {
        best = g;
        pick = cd;
      }
    }
    if (best > 0) {
      for (auto& l : label) {
        if (l == pick.second) l = pick.first;
      }
      deg[pick.first] += deg[pick.second];
      deg[pick.second] = 0;
      changed = true;
    }
  }
}

// Q * 4m^2 for a labeling with labels in [0, n).
std::int64_t scaled_modularity(const std::vector<std::vector<NodeId>>& adj, std::int64_t m,
                               const std::vector<std::size_t>& label) {
  const std::size_t n = adj.size();
  std::vector<std::int64_t> deg(n, 0), inner(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    deg[label[v]] += static_cast<std::int64_t>(adj[v].size());
    for (NodeId w : adj[v]) {
      if (w > v && label[w] == label[v]) ++inner[label[v]];
    }
  }
  std::int64_t numer = 0;
  for (std::size_t c = 0; c < n; ++c) numer += 4 * m * inner[c] - deg[c] * deg[c];
  return numer;
}

// Extra local-search starts from singletons, each sweeping vertices in its
// own fixed pseudo-random order.
constexpr std::size_t kRestarts = 8;

}  // namespace

std::optional<ModularityResult> modularity(const DirectedNetwork& g) {
  const auto adj = g.undirected_neighbors();
  const std::size_t n = adj.size();
  std::int64_t m = 0;
  for (const auto& nb : adj) m += static_cast<std::int64_t>(nb.size());
  m /= 2;
  if (m == 0) return std::nullopt;

  // Exact integer bookkeeping: with m projected edges, Q * 4m^2 =
  // sum_c (4m * internal_c - degree_c^2), and merging c,d changes it by
  // 4m * links_cd - 2 * degree_c * degree_d.
  std::vector<std::int64_t> degree(n), internal(n, 0);
  std::vector<std::map<std::size_t, std::int64_t>> links(n);
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> owner(n);
  std::iota(owner.begin(), owner.end(), std::size_t{0});
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = static_cast<std::int64_t>(adj[v].size());
    for (NodeId w : adj[v]) links[v][w] = 1;
  }

  while (true) {
    bool found = false;
    std::int64_t best_gain = 0;
    std::size_t best_c = 0, best_d = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c]) continue;
      for (const auto& [d, l] : links[c]) {
        if (d <= c) continue;
        const std::int64_t gain = 4 * m * l - 2 * degree[c] * degree[d];
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
          best_d = d;
          found = true;
        }
      }
    }
    if (!found) break;

    const std::size_t c = best_c, d = best_d;
    internal[c] += internal[d] + links[c][d];
    degree[c] += degree[d];
    links[c].erase(d);
    for (const auto& [e, l] : links[d]) {
      if (e == c) continue;
      links[c][e] += l;
      links[e].erase(d);
      links[e][c] += l;
    }
    links[d].clear();
    alive[d] = false;
    for (auto& o : owner) {
      if (o == d) o = c;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  refine_partition(adj, m, order, owner);
  std::int64_t numer = scaled_modularity(adj, m, owner);

  Rng rng(derive_seed(0, "modularity"));
  for (std::size_t r = 0; r < kRestarts; ++r) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<std::size_t> label(n);
    std::iota(label.begin(), label.end(), std::size_t{0});
    refine_partition(adj, m, order, label);
    if (const std::int64_t q = scaled_modularity(adj, m, label); q > numer) {
      numer = q;
      owner = std::move(label);
    }
  }

  ModularityResult result;
  result.q = static_cast<double>(numer) / static_cast<double>(4 * m * m);
  result.community.resize(n);
  std::map<std::size_t, std::size_t> relabel;
  for (std::size_t v = 0; v < n; ++v) {
    auto [it, _] = relabel.try_emplace(owner[v], relabel.size());
    result.community[v] = it->second;
  }
  return result;
}

double partition_modularity(const DirectedNetwork& g, std::span<const std::size_t> community) {
  const auto adj = g.undirected_neighbors();
  const std::size_t n = adj.size();
  if (community.size() != n) throw UsageError("partition must label every node");
  std::int64_t m = 0;
  for (const auto& nb : adj) m += static_cast<std::int64_t>(nb.size());
  m /= 2;
  if (m == 0) throw UsageError("modularity is undefined without edges");

  std::map<std::size_t, std::int64_t> deg, inner;
  for (std::size_t v = 0; v < n; ++v) {
    deg[community[v]] += static_cast<std::int64_t>(adj[v].size());
    for (NodeId w : adj[v]) {
      if (w > v && community[w] == community[v]) ++inner[community[v]];
    }
  }
  std::int64_t numer = 0;
  for (const auto& [c, d] : deg) numer += 4 * m * inner[c] - d * d;
  return static_cast<double>(numer) / static_cast<double>(4 * m * m);
}

double edge_distance(const DirectedNetwork& a, const DirectedNetwork& b) {
  if (a.node_count() != b.node_count()) {
    throw UsageError(fmt::format("edge distance needs equal node counts ({} vs {})",
                                 a.node_count(), b.node_count()));
  }
  const std::size_t n = a.node_count();
  if (n < 2) return 0.0;
  const auto ea = a.edges();
  const auto eb = b.edges();
  std::size_t common = 0;
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i] == eb[j]) {
      ++common;
      ++i;
      ++j;
    } else if (ea[i] < eb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t differing = ea.size() + eb.size() - 2 * common;
  return static_cast<double>(differing) / static_cast<double>(n * (n - 1));
}

double ks_statistic(std::span<const int> a, std::span<const int> b) {
  if (a.empty() || b.empty()) throw UsageError("KS statistic needs two non-empty samples");
  std::vector<int> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  // Step both ECDFs past each distinct value before comparing.
  while (i < x.size() || j < y.size()) {
    int v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) v = x[i];
    else v = y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return best;
}

std::vector<int> degree_sequence(const DirectedNetwork& g) {
  const auto adj = g.undirected_neighbors();
  std::vector<int> degrees;
  degrees.reserve(adj.size());
  for (const auto& nb : adj) degrees.push_back(static_cast<int>(nb.size()));
  std::sort(degrees.begin(), degrees.end());
  return degrees;
}

MetricsReport compute_metrics(const DirectedNetwork& g) {
  MetricsReport r;
  r.node_count = g.node_count();
  r.edge_count = g.edge_count();
  r.density = density(g);
  r.avg_clustering = avg_clustering(g);
  r.lcc = lcc_proportion(g);
  r.avg_path = avg_path(g);
  if (auto mod = modularity(g)) r.modularity = mod->q;
  r.degree_sequence = degree_sequence(g);
  return r;
}

}  // namespace netweave
