#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "netweave/errors.hpp"
#include "netweave/generate.hpp"
#include "netweave/homophily.hpp"
#include "netweave/metrics.hpp"
#include "netweave/mock_backend.hpp"
#include "oracles.hpp"

using namespace netweave;
using fixture::bare_template;

namespace {

GenerationConfig quick_config() {
  GenerationConfig c;
  c.seed = 1;
  c.retry.backoff = std::chrono::milliseconds(0);
  return c;
}

MockConfig only_ego(MockPolicy p) {
  MockConfig c = signature_mock_config();
  c.ego = std::move(p);
  return c;
}

// Argmax over defined ratios, checked against the per-edge count oracle.
Attribute argmax_attribute(const DirectedNetwork& g, const Roster& r) {
  Attribute best = Attribute::Gender;
  double best_ratio = -1.0;
  for (Attribute a : kAllAttributes) {
    const double baseline = static_cast<double>(oracle::matching_pairs(r, a)) /
                            static_cast<double>(r.size() * (r.size() - 1));
    const double share = static_cast<double>(oracle::matching_edges(g, r, a)) /
                         static_cast<double>(g.edge_count());
    const double ratio = share / baseline;
    CHECK(same_group_ratio(g, r, a).ratio == doctest::Approx(ratio));
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = a;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("sequential: zero propensity gives the empty network") {
  MockPolicy p;
  p.out_degree_target = 0;
  MockBackend backend(only_ego(p));
  const Roster r = fixture::canonical_roster();
  const auto res = generate_sequential(backend, r, bare_template(Method::Sequential), quick_config());
  CHECK(res.network.edge_count() == 0);
  CHECK(backend.call_count() == 50);
  for (const auto& call : res.transcript.calls) CHECK(call.outcome == "empty");
}

TEST_CASE("sequential: nominating everyone gives the complete graph") {
  MockPolicy p;
  p.out_degree_target = 1000;
  MockBackend backend(only_ego(p));
  const Roster r = fixture::canonical_roster();
  const auto res = generate_sequential(backend, r, bare_template(Method::Sequential), quick_config());
  CHECK(res.network == DirectedNetwork::complete(50));
}

TEST_CASE("sequential: politics weight makes politics the top ratio") {
  MockPolicy p;
  p.weights = {{Attribute::Politics, 3.0}};
  p.seed = 1;
  p.noise = 0.9;
  MockBackend backend(only_ego(p));
  const Roster r = fixture::canonical_roster();
  const auto res = generate_sequential(backend, r, bare_template(Method::Sequential), quick_config());
  CHECK(res.network.edge_count() == 250);
  CHECK(argmax_attribute(res.network, r) == Attribute::Politics);
}

TEST_CASE("sequential: the result ignores processing order and parallelism") {
  const Roster r = fixture::canonical_roster();
  MockBackend backend;
  GenerationConfig base = quick_config();
  const auto reference =
      generate_sequential(backend, r, bare_template(Method::Sequential), base).network;
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    GenerationConfig c = base;
    c.processing_order.resize(50);
    std::iota(c.processing_order.begin(), c.processing_order.end(), PersonaId{0});
    for (std::size_t i = 49; i > 0; --i) std::swap(c.processing_order[i], c.processing_order[rng.below(i + 1)]);
    c.parallelism = 1 + rng.below(6);
    CHECK(generate_sequential(backend, r, bare_template(Method::Sequential), c).network == reference);
  }
}

TEST_CASE("sequential: a persona that never parses contributes nothing") {
  const Roster r = fixture::canonical_roster();
  fixture::FunctionBackend backend([&](const BackendRequest& req) -> std::string {
    if (*req.context->ego == 3) return "I have no idea.";
    return "- " + r[(*req.context->ego + 1) % 50].name + "\n";
  });
  GenerationConfig c = quick_config();
  c.retry.max_retries = 2;
  const auto res = generate_sequential(backend, r, bare_template(Method::Sequential), c);
  CHECK(res.network.edge_count() == 49);
  CHECK(backend.calls() == 49 + 3);
  CHECK(res.transcript.calls[3].outcome == "no_valid_nominations");
  CHECK(res.transcript.calls[3].responses.size() == 3);
}

TEST_CASE("sequential: backend failure raises with the transcript") {
  const Roster r = fixture::canonical_roster();
  fixture::FunctionBackend backend([](const BackendRequest& req) -> std::string {
    if (*req.context->ego == 7) throw HttpStatusError(500, "boom");
    return "none";
  });
  GenerationConfig c = quick_config();
  c.retry.max_retries = 1;
  try {
    generate_sequential(backend, r, bare_template(Method::Sequential), c);
    FAIL("expected a generation error");
  } catch (const GenerationError& e) {
    CHECK(e.transcript().calls.size() == 50);
    CHECK(e.transcript().calls[7].outcome == "error");
  }
}

TEST_CASE("sequential: wrong template method is rejected") {
  MockBackend backend;
  CHECK_THROWS_AS(generate_sequential(backend, fixture::canonical_roster(), bare_template(Method::Global),
                                      quick_config()),
                  UsageError);
}

TEST_CASE("global: a fixed edge list comes back exactly") {
  const Roster r = fixture::canonical_roster();
  const std::vector<Edge> edges{{0, 1}, {1, 0}, {4, 9}, {49, 2}};
  fixture::FunctionBackend backend([&](const BackendRequest&) {
    std::string out;
    for (const Edge& e : edges) out += r[e.source].name + " -> " + r[e.target].name + "\n";
    return out;
  });
  const auto res = generate_global(backend, r, bare_template(Method::Global), quick_config());
  CHECK(res.network == DirectedNetwork(50, edges));
  CHECK(backend.calls() == 1);
}

TEST_CASE("global: a persistent unknown name exhausts one retry cycle") {
  const Roster r = fixture::canonical_roster();
  fixture::FunctionBackend backend(
      [&](const BackendRequest&) { return r[0].name + " -> Zed Quill\n" + r[1].name + " -> " + r[2].name; });
  GenerationConfig c = quick_config();
  c.retry.max_retries = 1;
  CHECK_THROWS_AS(generate_global(backend, r, bare_template(Method::Global), c), GenerationError);
  CHECK(backend.calls() == 2);
}

TEST_CASE("global: a rejected response is wholly retried") {
  const Roster r = fixture::canonical_roster();
  int call = 0;
  fixture::FunctionBackend backend([&](const BackendRequest&) {
    return ++call == 1 ? r[0].name + " -> " + r[0].name + "\n" + r[1].name + " -> " + r[2].name
                       : r[3].name + " -> " + r[4].name;
  });
  const auto res = generate_global(backend, r, bare_template(Method::Global), quick_config());
  CHECK(res.network == DirectedNetwork(50, {{3, 4}}));
  CHECK(res.transcript.calls[0].responses.size() == 2);
}

TEST_CASE("global: the signature mock lands in the sparse band and favors age") {
  const Roster r = fixture::canonical_roster();
  MockBackend backend;
  const auto res = generate_global(backend, r, bare_template(Method::Global), quick_config());
  const double d = density(res.network);
  CHECK(d >= 0.03);
  CHECK(d <= 0.09);
  CHECK(argmax_attribute(res.network, r) == Attribute::AgeBracket);
}

TEST_CASE("local: neighborhoods") {
  for (std::uint64_t seed : {0ULL, 9ULL}) {
    for (PersonaId ego = 0; ego < 50; ++ego) {
      const auto nb = local_neighborhood(50, ego, 12, seed);
      CHECK(nb.size() == 12);
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      CHECK(std::find(nb.begin(), nb.end(), ego) == nb.end());
      CHECK(nb == local_neighborhood(50, ego, 12, seed));
    }
  }
  CHECK(local_neighborhood(50, 0, 12, 1) != local_neighborhood(50, 0, 12, 2));
  CHECK_THROWS_AS(local_neighborhood(50, 0, 50, 1), UsageError);
  CHECK_THROWS_AS(local_neighborhood(50, 0, 0, 1), UsageError);
}

TEST_CASE("local: edges stay inside each neighborhood") {
  const Roster r = fixture::canonical_roster();
  MockBackend backend;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenerationConfig c = quick_config();
    c.seed = seed;
    const auto res = generate_local(backend, r, bare_template(Method::Local), c);
    for (const Edge& e : res.network.edges()) {
      const auto nb = local_neighborhood(50, e.source, c.k, seed);
      CHECK(std::binary_search(nb.begin(), nb.end(), e.target));
    }
  }
}

TEST_CASE("local: k = n-1 shows everyone and matches sequential") {
  const Roster r = fixture::canonical_roster();
  MockBackend backend;
  GenerationConfig c = quick_config();
  c.k = 49;
  fixture::FunctionBackend spy([&](const BackendRequest& req) { return backend.complete(req); });
  const auto local = generate_local(spy, r, bare_template(Method::Local), c);
  for (const auto& req : spy.requests()) CHECK(req.context->candidates.size() == 49);
  const auto seq = generate_sequential(backend, r, bare_template(Method::Sequential), c);
  CHECK(local.network == seq.network);
}

TEST_CASE("local: nominating everyone shown gives out-degree k") {
  MockPolicy p;
  p.out_degree_target = 1000;
  MockBackend backend(only_ego(p));
  GenerationConfig c = quick_config();
  c.k = 7;
  const auto res = generate_local(backend, fixture::canonical_roster(), bare_template(Method::Local), c);
  const auto out = res.network.out_neighbors();
  for (const auto& nb : out) CHECK(nb.size() == 7);
}

TEST_CASE("local: names outside the neighborhood are dropped and logged") {
  const Roster r = fixture::canonical_roster();
  fixture::FunctionBackend backend([&](const BackendRequest& req) {
    std::string out;
    for (PersonaId j = 0; j < 50; ++j) {
      if (j != *req.context->ego) out += "- " + r[j].name + "\n";
    }
    return out;
  });
  GenerationConfig c = quick_config();
  c.k = 5;
  const auto res = generate_local(backend, r, bare_template(Method::Local), c);
  CHECK(res.network.edge_count() == 50 * 5);
  for (const auto& call : res.transcript.calls) {
    CHECK(call.tally.outside_allowed == 44);
    CHECK(call.rejections.size() == 44);
  }
}

TEST_CASE("local: k above n-1 is a usage error") {
  MockBackend backend;
  GenerationConfig c = quick_config();
  c.k = 60;
  CHECK_THROWS_AS(generate_local(backend, fixture::canonical_roster(), bare_template(Method::Local), c),
                  UsageError);
}

TEST_CASE("iterative: echo keeps E0 for every T") {
  MockConfig mc = signature_mock_config();
  mc.iterative = IterativeRule::Echo;
  MockBackend backend(mc);
  const Roster r = fixture::canonical_roster();
  for (std::size_t t : {0u, 1u, 3u, 5u}) {
    GenerationConfig c = quick_config();
    c.rounds = t;
    const auto res = generate_iterative(backend, r, bare_template(Method::Sequential),
                                        bare_template(Method::Iterative), c);
    REQUIRE(res.transcript.edge_sets.size() == t + 1);
    const auto e0 = DirectedNetwork(50, res.transcript.edge_sets.front());
    CHECK(res.network == e0);
  }
}

TEST_CASE("iterative: a clearing backend empties the network after round 1") {
  MockConfig mc = signature_mock_config();
  mc.iterative = IterativeRule::Clear;
  MockBackend backend(mc);
  GenerationConfig c = quick_config();
  const auto res = generate_iterative(backend, fixture::canonical_roster(),
                                      bare_template(Method::Sequential), bare_template(Method::Iterative), c);
  CHECK(!res.transcript.edge_sets[0].empty());
  CHECK(res.transcript.edge_sets[1].empty());
  CHECK(res.network.edge_count() == 0);
}

TEST_CASE("iterative: triadic closure never lowers clustering") {
  MockConfig mc = signature_mock_config();
  mc.iterative = IterativeRule::TriadicClosure;
  mc.ego.out_degree_target = 2;
  MockBackend backend(mc);
  GenerationConfig c = quick_config();
  c.rounds = 3;
  const auto res = generate_iterative(backend, fixture::canonical_roster(),
                                      bare_template(Method::Sequential), bare_template(Method::Iterative), c);
  double previous = -1.0;
  for (const auto& edges : res.transcript.edge_sets) {
    const double cc = avg_clustering(DirectedNetwork(50, edges));
    CHECK(cc >= previous);
    previous = cc;
  }
}

TEST_CASE("iterative: a failing round reports the last valid edge set") {
  const Roster r = fixture::canonical_roster();
  MockBackend mock;
  fixture::FunctionBackend backend([&](const BackendRequest& req) -> std::string {
    if (req.context->mode == PromptMode::Iterative && req.context->round == 2) return "gibberish -> nobody";
    return mock.complete(req);
  });
  GenerationConfig c = quick_config();
  c.retry.max_retries = 0;
  try {
    generate_iterative(backend, r, bare_template(Method::Sequential), bare_template(Method::Iterative), c);
    FAIL("expected a generation error");
  } catch (const GenerationError& e) {
    REQUIRE(e.last_valid().has_value());
    CHECK(e.transcript().edge_sets.size() == 2);
    CHECK(*e.last_valid() == DirectedNetwork(50, e.transcript().edge_sets.back()));
  }
}

TEST_CASE("iterative prompts carry the current edges and round") {
  const Roster r = fixture::canonical_roster();
  MockBackend mock;
  fixture::FunctionBackend spy([&](const BackendRequest& req) { return mock.complete(req); });
  GenerationConfig c = quick_config();
  c.rounds = 2;
  const auto res = generate_iterative(spy, r, bare_template(Method::Sequential),
                                      bare_template(Method::Iterative), c);
  const auto reqs = spy.requests();
  const auto& round2 = reqs.back();
  CHECK(round2.prompt.rfind("Round 2\n", 0) == 0);
  CHECK(round2.prompt.find(render_edges(r, res.transcript.edge_sets[1])) != std::string::npos);
}

TEST_CASE("mock selection rules") {
  const Roster r = fixture::canonical_roster();
  std::vector<PersonaId> all(50);
  std::iota(all.begin(), all.end(), PersonaId{0});
  MockPolicy flat;
  flat.out_degree_target = 3;
  CHECK(mock_select(flat, r, 0, all, 5) == std::vector<PersonaId>{1, 2, 3});

  MockPolicy party;
  party.weights = {{Attribute::Politics, 10.0}};
  party.noise = 0.9;
  for (PersonaId ego = 0; ego < 50; ++ego) {
    for (PersonaId j : mock_select(party, r, ego, all, 1)) CHECK(r[j].politics == r[ego].politics);
  }
}

TEST_CASE("mock global with a strong age weight makes age the top ratio") {
  MockConfig mc = signature_mock_config();
  mc.global.weights = {{Attribute::AgeBracket, 10.0}};
  MockBackend backend(mc);
  const Roster r = fixture::canonical_roster();
  const auto res = generate_global(backend, r, bare_template(Method::Global), quick_config());
  CHECK(argmax_attribute(res.network, r) == Attribute::AgeBracket);
}

TEST_CASE("mock reasons name the shared attribute") {
  const Roster r = fixture::canonical_roster();
  MockBackend backend;
  GenerationConfig c = quick_config();
  c.include_reason = true;
  const auto res = generate_sequential(backend, r, bare_template(Method::Sequential), c);
  REQUIRE(!res.transcript.nominations.empty());
  for (const auto& n : res.transcript.nominations) {
    REQUIRE(n.reason.has_value());
    const bool same_party = r[n.source].politics == r[n.target].politics;
    CHECK(*n.reason == (same_party ? "same politics" : "good company"));
  }
}

TEST_CASE("mock config parsing keeps defaults for missing keys") {
  const MockConfig c = parse_mock_config(R"({"ego": {"weights": {"age": 2}, "out_degree": 4},
                                             "iterative": "echo"})");
  CHECK(c.ego.weights == std::map<Attribute, double>{{Attribute::AgeBracket, 2.0}});
  CHECK(c.ego.out_degree_target == 4);
  CHECK(c.ego.noise == signature_mock_config().ego.noise);
  CHECK(c.iterative == IterativeRule::Echo);
  CHECK(c.global.out_degree_target == signature_mock_config().global.out_degree_target);
  CHECK_THROWS_AS(parse_mock_config(R"({"iterative": "shuffle"})"), ParseError);
  CHECK_THROWS_AS(parse_mock_config(R"({"ego": {"weights": {"height": 1}}})"), ParseError);
}

TEST_CASE("mock refuses requests without a context") {
  MockBackend backend;
  BackendRequest req;
  req.prompt = "hello";
  CHECK_THROWS_AS(backend.complete(req), ProtocolError);
}

TEST_CASE("transcripts round-trip through JSON") {
  MockBackend backend;
  GenerationConfig c = quick_config();
  c.include_reason = true;
  c.rounds = 1;
  auto res = generate_iterative(backend, fixture::canonical_roster(), bare_template(Method::Sequential),
                                bare_template(Method::Iterative), c);
  res.transcript.labels["culture"] = "us";
  const Transcript back = transcript_from_json(transcript_to_json(res.transcript));
  CHECK(back.labels == res.transcript.labels);
  CHECK(back.method == "iterative");
  CHECK(back.calls.size() == res.transcript.calls.size());
  CHECK(back.calls.back().round == std::optional<std::size_t>{1});
  CHECK(back.edge_sets == res.transcript.edge_sets);
  CHECK(back.nominations == res.transcript.nominations);
  CHECK(transcript_to_json(back) == transcript_to_json(res.transcript));
  CHECK_THROWS_AS(transcript_from_json("[1, 2"), ParseError);
}

TEST_CASE("verification") {
  const Roster r = fixture::canonical_roster();
  CHECK(verify_network(DirectedNetwork(50, {{0, 1}}), r).passed);
  const auto loop = verify_edges(std::vector<Edge>{{0, 1}, {4, 4}}, r);
  CHECK(!loop.passed);
  REQUIRE(loop.violations.size() == 1);
  CHECK(loop.violations[0].find("self-loop on 4") != std::string::npos);
  CHECK(!verify_edges(std::vector<Edge>{{0, 50}}, r).passed);
  CHECK(!verify_edges(std::vector<Edge>{{0, 1}, {0, 1}}, r).passed);
  CHECK(!verify_network(DirectedNetwork(49), r).passed);
}

TEST_CASE("config validation") {
  GenerationConfig c;
  CHECK_NOTHROW(c.validate(Method::Local, 50));
  c.temperature = -0.1;
  CHECK_THROWS_AS(c.validate(Method::Sequential, 50), UsageError);
  c = {};
  c.processing_order = {0, 1, 1};
  CHECK_THROWS_AS(c.validate(Method::Sequential, 3), UsageError);
  c = {};
  CHECK_THROWS_AS(c.validate(Method::Sequential, 1), UsageError);
}
