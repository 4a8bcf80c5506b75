#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flatflow/balance.hpp"
#include "flatflow/flow.hpp"
#include "flatflow/projection.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/spreading.hpp"
#include "flatflow/surface.hpp"

using namespace flatflow;

namespace {

const TranslationSurface& eighth() {
  static const TranslationSurface s = normalize_area(unfold_rational_polygon(
      make_rational_polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, std::tan(std::numbers::pi / 8.0)}})));
  return s;
}

std::vector<double> uniform_points(std::size_t m) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(m);
  for (double& v : x) v = u(rng);
  return x;
}

void BM_TraceHits(benchmark::State& state) {
  const TranslationSurface& s = eighth();
  const auto hits = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trace(s, {0, {0.3, 0.05}, 0.731}, {INFINITY, hits}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * hits));
}
BENCHMARK(BM_TraceHits)->Arg(1000)->Arg(100000);

void BM_HittingSetTorus(benchmark::State& state) {
  const TranslationSurface t = make_torus();
  for (auto _ : state) benchmark::DoNotOptimize(hitting_set(t, {0, {0.3, 0.2}, 0.7}, 10000));
}
BENCHMARK(BM_HittingSetTorus);

void BM_InducedIet(benchmark::State& state) {
  const TranslationSurface& s = eighth();
  for (auto _ : state) benchmark::DoNotOptimize(induced_iet(s, 0.61));
}
BENCHMARK(BM_InducedIet);

void BM_SaddleTorus(benchmark::State& state) {
  const TranslationSurface t = make_torus();
  const double T = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_saddle_connections(t, T));
}
BENCHMARK(BM_SaddleTorus)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SaddleTriangle(benchmark::State& state) {
  const double T = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_saddle_connections(eighth(), T));
}
BENCHMARK(BM_SaddleTriangle)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_CellOccupancy(benchmark::State& state) {
  const TranslationSurface& s = eighth();
  const CellGrid grid(s, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cell_occupancy(s, grid, {0, {0.3, 0.05}, 0.731}, 1000.0));
}
BENCHMARK(BM_CellOccupancy)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Telescoping(benchmark::State& state) {
  const auto x = uniform_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(telescoping_check(x, {2, 5}));
}
BENCHMARK(BM_Telescoping)->Arg(1000)->Arg(100000);

void BM_AntiCrowded(benchmark::State& state) {
  const auto x = uniform_points(static_cast<std::size_t>(state.range(0)));
  const double M1 = static_cast<double>(x.size()) / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(anti_crowded(x, 4.0, M1));
}
BENCHMARK(BM_AntiCrowded)->Arg(1000)->Arg(100000);

void BM_MajoritySet(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<IntervalUnion> sets;
  for (int i = 0; i < state.range(0); ++i) {
    std::vector<std::pair<double, double>> arcs;
    for (int a = 0; a < 200; ++a) {
      const double lo = u(rng);
      arcs.push_back({lo, lo + 1e-3});
    }
    sets.push_back(IntervalUnion::from_arcs(arcs).complement());
  }
  for (auto _ : state) benchmark::DoNotOptimize(majority_set(sets, 0.25));
}
BENCHMARK(BM_MajoritySet)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
