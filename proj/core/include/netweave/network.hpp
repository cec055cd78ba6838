#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netweave {

using NodeId = std::uint32_t;

struct Edge {
  NodeId source = 0;
  NodeId target = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Directed graph over a fixed node set 0..n-1.
///
/// Immutable after construction. Edges are kept sorted by (source, target);
/// self-loops, duplicates and out-of-range endpoints are rejected up front, so
/// every instance satisfies the network invariants.
class DirectedNetwork {
 public:
  DirectedNetwork() = default;
  explicit DirectedNetwork(std::size_t node_count);
  /// Throws ValidationError on a self-loop, duplicate, or endpoint >= node_count.
  DirectedNetwork(std::size_t node_count, std::vector<Edge> edges);

  static DirectedNetwork complete(std::size_t node_count);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  bool has_edge(NodeId source, NodeId target) const noexcept;

  std::vector<std::vector<NodeId>> out_neighbors() const;
  /// Neighbor lists of the undirected projection (u~v iff u->v or v->u), sorted.
  std::vector<std::vector<NodeId>> undirected_neighbors() const;

  bool operator==(const DirectedNetwork&) const = default;

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
};

/// .adj text: `n=<count>` header, then `src: dst dst ...` per non-empty source,
/// sources and destinations ascending, `\n` line endings, no trailing spaces.
std::string format_adj(const DirectedNetwork& g);
/// Throws ParseError on malformed lines and ValidationError on self-loops,
/// duplicates, or out-of-range ids; messages name the offending line.
DirectedNetwork parse_adj(std::string_view text);

DirectedNetwork read_adj(const std::filesystem::path& path);
void write_adj(const DirectedNetwork& g, const std::filesystem::path& path);

}  // namespace netweave
