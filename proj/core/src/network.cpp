#include "netweave/network.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "file_util.hpp"
#include "netweave/errors.hpp"
#include "text_util.hpp"

namespace netweave {

DirectedNetwork::DirectedNetwork(std::size_t node_count) : node_count_(node_count) {}

DirectedNetwork::DirectedNetwork(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.source >= node_count_ || e.target >= node_count_) {
      throw ValidationError(fmt::format("edge {} -> {} has an endpoint outside 0..{}", e.source,
                                        e.target, node_count_ == 0 ? 0 : node_count_ - 1));
    }
    if (e.source == e.target) {
      throw ValidationError(fmt::format("self-loop on node {}", e.source));
    }
    if (i > 0 && edges_[i - 1] == e) {
      throw ValidationError(fmt::format("duplicate edge {} -> {}", e.source, e.target));
    }
  }
}

DirectedNetwork DirectedNetwork::complete(std::size_t node_count) {
  std::vector<Edge> edges;
  edges.reserve(node_count * (node_count > 0 ? node_count - 1 : 0));
  for (NodeId i = 0; i < node_count; ++i) {
    for (NodeId j = 0; j < node_count; ++j) {
      if (i != j) edges.push_back({i, j});
    }
  }
  return DirectedNetwork(node_count, std::move(edges));
}

bool DirectedNetwork::has_edge(NodeId source, NodeId target) const noexcept {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{source, target});
}

std::vector<std::vector<NodeId>> DirectedNetwork::out_neighbors() const {
  std::vector<std::vector<NodeId>> out(node_count_);
  for (const Edge& e : edges_) out[e.source].push_back(e.target);
  return out;
}

std::vector<std::vector<NodeId>> DirectedNetwork::undirected_neighbors() const {
  std::vector<std::vector<NodeId>> adj(node_count_);
  for (const Edge& e : edges_) {
    adj[e.source].push_back(e.target);
    adj[e.target].push_back(e.source);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

std::string format_adj(const DirectedNetwork& g) {
  std::string out = fmt::format("n={}\n", g.node_count());
  const auto edges = g.edges();
  std::size_t i = 0;
  while (i < edges.size()) {
    const NodeId src = edges[i].source;
    out += fmt::format("{}:", src);
    for (; i < edges.size() && edges[i].source == src; ++i) {
      out += fmt::format(" {}", edges[i].target);
    }
    out += '\n';
  }
  return out;
}

namespace {

bool parse_uint(std::string_view token, std::uint64_t& value) {
  if (token.empty()) return false;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

DirectedNetwork parse_adj(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("line 1: missing 'n=<count>' header");

  const std::string_view header = lines[0];
  std::uint64_t n = 0;
  if (header.substr(0, 2) != "n=" || !parse_uint(header.substr(2), n)) {
    throw ParseError(fmt::format("line 1: expected 'n=<count>', got '{}'", header));
  }

  std::vector<Edge> edges;
  std::vector<bool> seen_source(n, false);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    std::string_view line = lines[li];
    if (line.empty()) throw ParseError(fmt::format("line {}: empty line", line_no));
    if (detail::is_space(line.back())) {
      throw ParseError(fmt::format("line {}: trailing whitespace", line_no));
    }
    const std::size_t colon = line.find(':');
    std::uint64_t src = 0;
    if (colon == std::string_view::npos || !parse_uint(line.substr(0, colon), src)) {
      throw ParseError(fmt::format("line {}: expected '<src>: <dst> ...'", line_no));
    }
    if (src >= n) {
      throw ValidationError(
          fmt::format("line {}: source {} out of range for n={}", line_no, src, n));
    }
    if (seen_source[src]) {
      throw ValidationError(fmt::format("line {}: source {} listed twice", line_no, src));
    }
    seen_source[src] = true;

    std::string_view rest = line.substr(colon + 1);
    std::vector<std::uint64_t> targets;
    std::size_t pos = 0;
    while (pos < rest.size()) {
      if (rest[pos] != ' ') {
        throw ParseError(fmt::format("line {}: destinations must be separated by single spaces",
                                     line_no));
      }
      ++pos;
      const std::size_t next = std::min(rest.find(' ', pos), rest.size());
      std::uint64_t dst = 0;
      if (!parse_uint(rest.substr(pos, next - pos), dst)) {
        throw ParseError(fmt::format("line {}: bad destination '{}'", line_no,
                                     rest.substr(pos, next - pos)));
      }
      if (dst >= n) {
        throw ValidationError(
            fmt::format("line {}: node id {} out of range for n={}", line_no, dst, n));
      }
      if (dst == src) {
        throw ValidationError(fmt::format("line {}: self-loop {} -> {}", line_no, src, dst));
      }
      if (std::find(targets.begin(), targets.end(), dst) != targets.end()) {
        throw ValidationError(
            fmt::format("line {}: duplicate edge {} -> {}", line_no, src, dst));
      }
      targets.push_back(dst);
      pos = next;
    }
    if (targets.empty()) {
      throw ParseError(fmt::format("line {}: source {} has no destinations", line_no, src));
    }
    for (auto dst : targets) {
      edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst)});
    }
  }
  return DirectedNetwork(static_cast<std::size_t>(n), std::move(edges));
}

DirectedNetwork read_adj(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  try {
    return parse_adj(text);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_adj(const DirectedNetwork& g, const std::filesystem::path& path) {
  detail::write_file_atomic(path, format_adj(g));
}

}  // namespace netweave
