#include <benchmark/benchmark.h>

#include "demfill/blend.hpp"
#include "demfill/fillers.hpp"
#include "demfill/geometry.hpp"
#include "demfill/metrics.hpp"

namespace {

using namespace demfill;

struct Case {
  DemGrid truth;
  VoidMask mask;
  DemGrid known;
};

Case make_case(int size) {
  Case c{synth_terrain(size, size, 3, TerrainKind::fractal), sample_rect_mask(size, size, 3, {3, size / 8, size / 3}),
         {}};
  c.known = apply_mask(c.truth, c.mask);
  return c;
}

void BM_RingPartition(benchmark::State& state) {
  const Case c = make_case(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ring_partition(c.mask));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.mask.size()));
}
BENCHMARK(BM_RingPartition)->Arg(64)->Arg(256);

void BM_FillExtend(benchmark::State& state) {
  const Case c = make_case(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fill_extend(c.known, c.mask, 3));
}
BENCHMARK(BM_FillExtend)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FillIdw(benchmark::State& state) {
  const Case c = make_case(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fill_idw(c.known, c.mask));
}
BENCHMARK(BM_FillIdw)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FillSpline(benchmark::State& state) {
  const Case c = make_case(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fill_spline(c.known, c.mask));
}
BENCHMARK(BM_FillSpline)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BlendBoundary(benchmark::State& state) {
  const Case c = make_case(64);
  const DemGrid filled = fill_idw(c.known, c.mask);
  for (auto _ : state) benchmark::DoNotOptimize(blend_boundary(c.known, filled, c.mask));
}
BENCHMARK(BM_BlendBoundary)->Unit(benchmark::kMillisecond);

void BM_EmHistogram(benchmark::State& state) {
  const Case c = make_case(128);
  const DemGrid filled = fill_idw(c.known, c.mask);
  for (auto _ : state) benchmark::DoNotOptimize(em_histogram(filled, c.truth, c.mask));
}
BENCHMARK(BM_EmHistogram);

}  // namespace
