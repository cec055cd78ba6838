#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "netweave/generate.hpp"
#include "netweave/mock_backend.hpp"

using namespace netweave;

namespace {

// Whole-network generation against the mock, so this measures prompt
// rendering, parsing and bookkeeping rather than any model.
void BM_MockGeneration(benchmark::State& state) {
  const auto method = static_cast<Method>(state.range(0));
  const Roster r = fixture::canonical_roster();
  MockBackend backend;
  const TemplateStore store(default_template_dir());
  const auto tpl = store.load(method, Language::En, Culture::US);
  const auto seq = store.load(Method::Sequential, Language::En, Culture::US);
  GenerationConfig c;
  for (auto _ : state) {
    GenerationResult res;
    switch (method) {
      case Method::Sequential: res = generate_sequential(backend, r, tpl, c); break;
      case Method::Global: res = generate_global(backend, r, tpl, c); break;
      case Method::Local: res = generate_local(backend, r, tpl, c); break;
      case Method::Iterative: res = generate_iterative(backend, r, seq, tpl, c); break;
    }
    benchmark::DoNotOptimize(res.network.edge_count());
  }
  state.SetLabel(std::string(method_name(method)));
}
BENCHMARK(BM_MockGeneration)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_RenderCards(benchmark::State& state) {
  const Roster r = fixture::canonical_roster();
  std::vector<PersonaId> ids(r.size());
  for (PersonaId i = 0; i < r.size(); ++i) ids[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(render_cards(r, ids));
}
BENCHMARK(BM_RenderCards);

}  // namespace
