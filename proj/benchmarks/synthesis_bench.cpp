#include <benchmark/benchmark.h>

#include "thermal_cbf/cbf_field.hpp"
#include "thermal_cbf/krylov.hpp"
#include "thermal_cbf/map_generators.hpp"

using namespace thermal_cbf;

namespace {

struct Fixture {
  GridMap map;
  RegionLabels labels;
  LinearSystem system;
};

const Fixture& local_map() {
  static const Fixture f = [] {
    Rng rng(derive_seed(1, 0));
    GridMap m = random_bench_map({}, rng);
    RegionLabels l = classify_regions(m, distance_transform(m), 0.15);
    LinearSystem s = assemble(l, index_unknowns(l), {});
    return Fixture{std::move(m), std::move(l), std::move(s)};
  }();
  return f;
}

void BM_DistanceTransform(benchmark::State& state) {
  const auto& f = local_map();
  for (auto _ : state) benchmark::DoNotOptimize(distance_transform(f.map));
}
BENCHMARK(BM_DistanceTransform)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const auto& f = local_map();
  for (auto _ : state) benchmark::DoNotOptimize(assemble(f.labels, index_unknowns(f.labels), {}));
  state.counters["N"] = double(f.system.size());
}
BENCHMARK(BM_Assemble)->Unit(benchmark::kMillisecond);

void BM_Gmres(benchmark::State& state) {
  const auto& f = local_map();
  SolverConfig cfg;
  cfg.restart = std::size_t(state.range(0));
  std::size_t iters = 0;
  for (auto _ : state) iters = gmres(f.system, cfg).stats.iterations;
  state.counters["iterations"] = double(iters);
}
BENCHMARK(BM_Gmres)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Bicgstab(benchmark::State& state) {
  const auto& f = local_map();
  std::size_t iters = 0;
  for (auto _ : state) iters = bicgstab(f.system).stats.iterations;
  state.counters["iterations"] = double(iters);
}
BENCHMARK(BM_Bicgstab)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
  const auto& f = local_map();
  SynthesisParams p;
  p.solver = state.range(0) ? SolverKind::Bicgstab : SolverKind::Gmres;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(f.map, p));
}
BENCHMARK(BM_Synthesize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
