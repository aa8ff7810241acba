#include <benchmark/benchmark.h>

#include <random>

#include "demfill/geometry.hpp"
#include "demfill/neural/attention.hpp"
#include "demfill/neural/generator.hpp"
#include "demfill/neural/ops.hpp"

namespace {

using namespace demfill;
using namespace demfill::neural;

Tensor4 random_input(int c, int h, int w) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  Tensor4 x(1, c, h, w);
  for (float& v : x.data()) v = d(rng);
  return x;
}

void BM_Conv2d(benchmark::State& state) {
  const int ch = static_cast<int>(state.range(0));
  const ConvShape s{ch, ch, 3, 1, static_cast<int>(state.range(1))};
  const Tensor4 x = random_input(ch, 32, 32);
  const std::vector<float> w(s.weight_count(), 0.01f), b(static_cast<std::size_t>(ch), 0.0f);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d<float>(x, w, b, s));
}
BENCHMARK(BM_Conv2d)->Args({16, 1})->Args({64, 1})->Args({64, 4})->Unit(benchmark::kMillisecond);

void BM_ContextualAttention(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Tensor4 fg = random_input(64, side, side), bg = random_input(64, side, side);
  const VoidMask m = sample_rect_mask(side, side, 2, {1, side / 4, side / 2});
  for (auto _ : state) benchmark::DoNotOptimize(contextual_attention(fg, bg, m, 10.0, 3));
}
BENCHMARK(BM_ContextualAttention)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_GeneratorForward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const NetworkSpec spec = canonical_network_spec();
  const WeightStore w = init_weights(parameter_slots(spec), 1);
  const DemGrid truth = synth_terrain(side, side, 1, TerrainKind::gaussian_hills);
  const VoidMask m = sample_rect_mask(side, side, 1, {2, side / 8, side / 3});
  const DemGrid known = apply_mask(truth, m);
  for (auto _ : state) benchmark::DoNotOptimize(generator_forward(known, m, spec, w));
}
BENCHMARK(BM_GeneratorForward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
