#include <benchmark/benchmark.h>

#include "decode/density.hpp"
#include "decode/generator.hpp"
#include "decode/mpnn.hpp"
#include "decode/rww.hpp"
#include "decode/sgns.hpp"

using namespace decode;

static void BM_CoreNumbers(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = random_graph_with_edges(n, n * 18 / 10, 7);
  for (auto _ : state) benchmark::DoNotOptimize(core_numbers(g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edge_count()));
}
BENCHMARK(BM_CoreNumbers)->Arg(10'000)->Arg(120'000)->Unit(benchmark::kMillisecond);

static void BM_EdgeTruss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = random_graph_with_edges(n, n * 18 / 10, 7);
  for (auto _ : state) benchmark::DoNotOptimize(edge_truss_numbers(g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edge_count()));
}
BENCHMARK(BM_EdgeTruss)->Arg(10'000)->Arg(120'000)->Unit(benchmark::kMillisecond);

static void BM_Walks(benchmark::State& state) {
  const Graph g = erdos_renyi(static_cast<std::size_t>(state.range(0)), 0.05, 3);
  const auto profile = density_profile(g, DensityMetric::degree);
  WalkConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(generate_walks(g, profile, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(cfg.walk_length));
}
BENCHMARK(BM_Walks)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Sgns(benchmark::State& state) {
  const Graph g = erdos_renyi(100, 0.05, 3);
  const auto corpus = generate_walks(g, density_profile(g, DensityMetric::degree), {});
  SgnsConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_sgns(corpus, g.node_count(), cfg));
}
BENCHMARK(BM_Sgns)->Unit(benchmark::kMillisecond);

static void BM_MpnnForward(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  const Graph g = erdos_renyi(100, 0.05, 3);
  const Model model(variant, 128, 128, 2, 2, 1);
  Matrix x = Matrix::Random(100, 128);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(g, x));
  state.SetLabel(to_string(variant));
}
BENCHMARK(BM_MpnnForward)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
