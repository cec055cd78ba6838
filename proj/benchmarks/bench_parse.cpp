#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "netweave/parse.hpp"

using namespace netweave;

namespace {

void BM_ParseResponse(benchmark::State& state) {
  const Roster r = fixture::canonical_roster();
  std::string text = "Here are my picks:\n";
  std::set<PersonaId> allowed;
  for (PersonaId i = 1; i < r.size(); ++i) {
    allowed.insert(i);
    if (i % 5 == 0) text += "- " + r[i].name + ": we share hobbies\n";
  }
  for (auto _ : state) benchmark::DoNotOptimize(parse_response(text, 0, allowed, r, true));
}
BENCHMARK(BM_ParseResponse);

void BM_ParseEdgeList(benchmark::State& state) {
  const Roster r = fixture::canonical_roster();
  std::string text;
  for (PersonaId i = 0; i < r.size(); ++i) {
    for (PersonaId d = 1; d <= 4; ++d) text += r[i].name + " -> " + r[(i + d * 7) % r.size()].name + "\n";
  }
  for (auto _ : state) benchmark::DoNotOptimize(parse_edge_list(text, r, false));
}
BENCHMARK(BM_ParseEdgeList);

}  // namespace
