#include "netweave/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "csv.hpp"
#include "netweave/errors.hpp"
#include "netweave/random.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace netweave {

namespace {

DirectedNetwork from_undirected(std::size_t n, const std::vector<std::set<NodeId>>& adj) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : adj[u]) edges.push_back({u, v});
  }
  return DirectedNetwork(n, std::move(edges));
}

void link(std::vector<std::set<NodeId>>& adj, NodeId u, NodeId v) {
  adj[u].insert(v);
  adj[v].insert(u);
}

}  // namespace

DirectedNetwork generate_er(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError(fmt::format("ER p must be in [0, 1] (got {})", p));
  Rng rng(derive_seed(seed, "er"));
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) {
        edges.push_back({i, j});
        edges.push_back({j, i});
      }
    }
  }
  return DirectedNetwork(n, std::move(edges));
}

DirectedNetwork generate_ba(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m >= n) {
    throw UsageError(fmt::format("BA needs 1 <= m < n (got m={}, n={})", m, n));
  }
  Rng rng(derive_seed(seed, "ba"));
  std::vector<std::set<NodeId>> adj(n);
  for (NodeId i = 0; i < m; ++i) {
    for (NodeId j = i + 1; j < m; ++j) link(adj, i, j);
  }
  for (NodeId v = static_cast<NodeId>(m); v < n; ++v) {
    std::vector<double> weight(v);
    for (NodeId u = 0; u < v; ++u) weight[u] = static_cast<double>(adj[u].size());
    std::vector<NodeId> chosen;
    while (chosen.size() < m) {
      const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
      NodeId pick = 0;
      if (total > 0.0) {
        pick = static_cast<NodeId>(rng.weighted_index(weight));
      } else {
        // Only reachable while every remaining node is isolated (m = 1 start).
        std::vector<NodeId> open;
        for (NodeId u = 0; u < v; ++u) {
          if (std::find(chosen.begin(), chosen.end(), u) == chosen.end()) open.push_back(u);
        }
        pick = open[rng.below(open.size())];
      }
      chosen.push_back(pick);
      weight[pick] = 0.0;
    }
    for (NodeId u : chosen) link(adj, v, u);
  }
  return from_undirected(n, adj);
}

DirectedNetwork generate_ws(std::size_t n, std::size_t k_ring, double beta, std::uint64_t seed) {
  if (k_ring % 2 != 0 || k_ring >= n) {
    throw UsageError(fmt::format("WS needs an even k_ring < n (got k_ring={}, n={})", k_ring, n));
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw UsageError(fmt::format("WS beta must be in [0, 1] (got {})", beta));
  }
  Rng rng(derive_seed(seed, "ws"));
  std::vector<std::set<NodeId>> adj(n);
  const std::size_t half = k_ring / 2;
  for (NodeId u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= half; ++j) link(adj, u, static_cast<NodeId>((u + j) % n));
  }
  for (std::size_t j = 1; j <= half; ++j) {
    for (NodeId u = 0; u < n; ++u) {
      const NodeId v = static_cast<NodeId>((u + j) % n);
      if (!rng.bernoulli(beta)) continue;
      if (adj[u].size() >= n - 1) continue;
      NodeId w = u;
      while (w == u || adj[u].contains(w)) w = static_cast<NodeId>(rng.below(n));
      adj[u].erase(v);
      adj[v].erase(u);
      link(adj, u, w);
    }
  }
  return from_undirected(n, adj);
}

std::string_view family_name(BaselineFamily f) noexcept {
  switch (f) {
    case BaselineFamily::ER: return "ER";
    case BaselineFamily::BA: return "BA";
    case BaselineFamily::WS: return "WS";
  }
  return "unknown";
}

BaselineFamily family_from_name(std::string_view name) {
  const std::string upper = detail::to_upper(name);
  for (BaselineFamily f : kAllFamilies) {
    if (family_name(f) == upper) return f;
  }
  throw UsageError(fmt::format("unknown baseline family '{}'", name));
}

DirectedNetwork generate_baseline(const BaselineParams& params, std::size_t n,
                                  std::uint64_t seed) {
  switch (params.family) {
    case BaselineFamily::ER: return generate_er(n, params.p, seed);
    case BaselineFamily::BA: return generate_ba(n, params.m, seed);
    case BaselineFamily::WS: return generate_ws(n, params.k_ring, params.beta, seed);
  }
  throw UsageError("unknown baseline family");
}

BaselineParams calibrate(const CalibrationTarget& target, BaselineFamily family,
                         double ws_beta) {
  const std::size_t n = target.n;
  if (n < 3) throw UsageError("calibration needs n >= 3");
  if (!(target.density > 0.0 && target.density < 1.0)) {
    throw UsageError(fmt::format("target density must be in (0, 1) (got {})", target.density));
  }
  if (target.seeds.empty()) throw UsageError("calibration needs at least one seed");

  BaselineParams params;
  params.family = family;
  params.beta = ws_beta;
  const double scaled = target.density * static_cast<double>(n - 1);
  switch (family) {
    case BaselineFamily::ER:
      params.p = target.density;
      break;
    case BaselineFamily::BA:
      params.m = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(scaled / 2.0)), 1,
                                         n - 2);
      break;
    case BaselineFamily::WS: {
      const std::size_t k_max = n % 2 == 0 ? n - 2 : n - 1;
      const double ceiling = static_cast<double>(k_max) / static_cast<double>(n - 1);
      if (target.density > ceiling) {
        throw CalibrationError(fmt::format(
            "WS cannot reach density {} with n={}: the largest even k_ring ({}) gives {:.4f}",
            target.density, n, k_max, ceiling));
      }
      params.k_ring = 2 * static_cast<std::size_t>(std::llround(scaled / 2.0));
      if (params.k_ring == 0) {
        throw CalibrationError(fmt::format(
            "WS cannot reach density {} with n={}: the smallest lattice (k_ring=2) gives {:.4f}",
            target.density, n, 2.0 / static_cast<double>(n - 1)));
      }
      break;
    }
  }

  double sum = 0.0;
  for (std::uint64_t s : target.seeds) sum += density(generate_baseline(params, n, s));
  params.mean_density = sum / static_cast<double>(target.seeds.size());
  if (std::abs(params.mean_density - target.density) > 0.1 * target.density) {
    throw CalibrationError(fmt::format(
        "{} at its calibrated parameters averages density {:.4f}, more than 10% from {}",
        family_name(family), params.mean_density, target.density));
  }
  return params;
}

MeanStderr summarize(std::span<const double> values) {
  MeanStderr r;
  r.count = values.size();
  if (values.empty()) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  r.std_error = sd / std::sqrt(static_cast<double>(values.size()));
  return r;
}

namespace {

constexpr std::array<std::string_view, 7> kSuiteMetrics{
    "density", "avg_clustering", "lcc", "avg_path", "modularity", "max_degree", "mean_degree"};

std::optional<double> metric_value(const MetricsReport& r, std::string_view name) {
  if (name == "density") return r.density;
  if (name == "avg_clustering") return r.avg_clustering;
  if (name == "lcc") return r.lcc;
  if (name == "avg_path") return r.avg_path;
  if (name == "modularity") return r.modularity;
  if (r.degree_sequence.empty()) return std::nullopt;
  if (name == "max_degree") return static_cast<double>(r.degree_sequence.back());
  if (name == "mean_degree") {
    const double total =
        std::accumulate(r.degree_sequence.begin(), r.degree_sequence.end(), 0.0);
    return total / static_cast<double>(r.degree_sequence.size());
  }
  return std::nullopt;
}

}  // namespace

std::span<const std::string_view> suite_metric_names() noexcept { return kSuiteMetrics; }

std::vector<FamilySuite> baseline_suite(const CalibrationTarget& target,
                                        std::span<const BaselineFamily> families,
                                        double ws_beta, std::size_t parallelism) {
  if (target.seeds.size() < 2) throw UsageError("a baseline suite needs at least 2 seeds");
  std::vector<FamilySuite> out;
  for (BaselineFamily f : families) {
    FamilySuite suite;
    suite.params = calibrate(target, f, ws_beta);
    suite.seeds = target.seeds;
    suite.reports.resize(target.seeds.size());
    detail::parallel_for(target.seeds.size(), parallelism, [&](std::size_t i) {
      suite.reports[i] = compute_metrics(generate_baseline(suite.params, target.n, target.seeds[i]));
    });
    for (std::string_view name : kSuiteMetrics) {
      std::vector<double> values;
      for (const auto& r : suite.reports) {
        if (auto v = metric_value(r, name)) values.push_back(*v);
      }
      suite.summary[std::string(name)] = summarize(values);
    }
    out.push_back(std::move(suite));
  }
  return out;
}

void write_suite_csv(std::ostream& out, std::span<const FamilySuite> suites) {
  out << "family,seed,node_count,edge_count,density,avg_clustering,lcc,avg_path,modularity,"
         "degree_sequence\n";
  for (const auto& s : suites) {
    for (std::size_t i = 0; i < s.reports.size(); ++i) {
      const auto& r = s.reports[i];
      std::string degrees;
      for (std::size_t d = 0; d < r.degree_sequence.size(); ++d) {
        if (d > 0) degrees += ' ';
        degrees += std::to_string(r.degree_sequence[d]);
      }
      out << family_name(s.params.family) << ',' << s.seeds[i] << ',' << r.node_count << ','
          << r.edge_count << ',' << detail::csv_number(r.density) << ','
          << detail::csv_number(r.avg_clustering) << ',' << detail::csv_number(r.lcc) << ','
          << detail::csv_number(r.avg_path) << ',' << detail::csv_number(r.modularity) << ','
          << degrees << '\n';
    }
  }
}

void write_suite_summary_csv(std::ostream& out, std::span<const FamilySuite> suites) {
  out << "family,metric,mean,stderr,count\n";
  for (const auto& s : suites) {
    for (std::string_view name : kSuiteMetrics) {
      const MeanStderr& m = s.summary.at(std::string(name));
      out << family_name(s.params.family) << ',' << name << ',' << detail::csv_number(m.mean)
          << ',' << detail::csv_number(m.std_error) << ',' << m.count << '\n';
    }
  }
}

}  // namespace netweave
