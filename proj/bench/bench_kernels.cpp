// Serial reference vs OpenMP kernel. Arg 0 = Exec::Serial, 1 = Exec::Parallel.
#include <benchmark/benchmark.h>

#include "anosov/atlas.hpp"
#include "anosov/holder.hpp"
#include "anosov/model.hpp"
#include "anosov/spectrum.hpp"

using namespace anosov;

namespace {

const Model& model() {
  static const Model m = build_model({});
  return m;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_build_grid(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(build_grid(model().map, 320, 1e-9, exec_of(s)));
}

void BM_map_check(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(map_check(model().map, 20000, 1, 1e-6, exec_of(s)));
}

void BM_persistence(benchmark::State& s) {
  const auto m = model().map.with_t(0.5);
  for (auto _ : s) benchmark::DoNotOptimize(anosov_persistence_check(m, 64, 5, exec_of(s)));
}

void BM_cone_suite(benchmark::State& s) {
  RegionAtlas atlas(model().map, model().frame);
  ConeOptions opt;
  opt.samples = 5000;
  for (auto _ : s) benchmark::DoNotOptimize(verify_cone_conditions(model().map, atlas, opt, exec_of(s)));
}

void BM_holder_pairs(benchmark::State& s) {
  HolderOptions ho;
  ho.pairs_per_scale = 200;
  const auto H = h_map(model().map, 22);
  const auto sc = scale_ladder(0.025, 6);
  for (auto _ : s) benchmark::DoNotOptimize(estimate_exponent(H, uniform_pairs(5), sc, ho, "bench", exec_of(s)));
}

void BM_periodic_spectrum(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(periodic_spectrum(model().map, nullptr, 4, {}, exec_of(s)));
}

}  // namespace

BENCHMARK(BM_build_grid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_map_check)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_persistence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cone_suite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_holder_pairs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_periodic_spectrum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
