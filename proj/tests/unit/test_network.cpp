#include <doctest.h>

#include "fixtures.hpp"
#include "netweave/errors.hpp"
#include "netweave/network.hpp"

using namespace netweave;

TEST_CASE("construction rejects invalid edges") {
  CHECK_THROWS_AS(DirectedNetwork(3, {{1, 1}}), ValidationError);
  CHECK_THROWS_AS(DirectedNetwork(3, {{0, 1}, {0, 1}}), ValidationError);
  CHECK_THROWS_AS(DirectedNetwork(3, {{0, 3}}), ValidationError);
}

TEST_CASE("edges are kept sorted and queryable") {
  const DirectedNetwork g(4, {{2, 0}, {0, 3}, {0, 1}});
  const std::vector<Edge> expected{{0, 1}, {0, 3}, {2, 0}};
  CHECK(std::vector<Edge>(g.edges().begin(), g.edges().end()) == expected);
  CHECK(g.has_edge(2, 0));
  CHECK(!g.has_edge(0, 2));
  const auto und = g.undirected_neighbors();
  CHECK(und[0] == std::vector<NodeId>{1, 2, 3});
  CHECK(und[2] == std::vector<NodeId>{0});
}

TEST_CASE("complete graph") {
  const auto g = DirectedNetwork::complete(5);
  CHECK(g.edge_count() == 20);
}

TEST_CASE(".adj format is canonical") {
  const DirectedNetwork g(4, {{2, 0}, {0, 3}, {0, 1}});
  CHECK(format_adj(g) == "n=4\n0: 1 3\n2: 0\n");
  CHECK(format_adj(DirectedNetwork(3)) == "n=3\n");
}

TEST_CASE(".adj write then read is the identity") {
  Rng rng(4);
  fixture::TempDir dir;
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = fixture::random_graph(rng, 1 + rng.below(25), rng.uniform());
    CHECK(parse_adj(format_adj(g)) == g);
    write_adj(g, dir.path() / "g.adj");
    CHECK(read_adj(dir.path() / "g.adj") == g);
  }
}

TEST_CASE(".adj errors") {
  CHECK_THROWS_AS(parse_adj("n=5\n3: 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_adj("n=50\n0: 50\n"), ValidationError);
  CHECK_THROWS_AS(parse_adj("n=5\n1: 2 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_adj("0: 1\n"), ParseError);
  CHECK_THROWS_AS(parse_adj("n=5\n1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_adj("n=5\n1: x\n"), ParseError);
  try {
    parse_adj("n=5\n0: 1\n3: 3\n");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
