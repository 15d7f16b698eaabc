#include <benchmark/benchmark.h>

#include "blindmimo/channel.hpp"
#include "blindmimo/detector.hpp"
#include "blindmimo/manifold.hpp"

using namespace blindmimo;

namespace {

struct Instance {
  CMatrix y;
  StiefelPoint a;
  RVector g;
};

Instance make(int m, int t, int k) {
  Rng rng(17);
  const auto ch = bernoulli_gaussian_channel(m, k, 0.1, rng);
  const CMatrix x = random_stiefel(t, k, rng).matrix().adjoint();
  CMatrix y = ch.h_bar() * x + 0.01 * rng.complex_normal_matrix(m, t);
  return {std::move(y), random_stiefel(t, k, rng), RVector::Ones(k)};
}

void BM_PolarRetract(benchmark::State& state) {
  Rng rng(1);
  const CMatrix m = rng.complex_normal_matrix(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(polar_retract(m));
}
BENCHMARK(BM_PolarRetract)->Args({240, 8})->Args({240, 32})->Args({1024, 8});

void BM_Objective(benchmark::State& state) {
  const Instance in = make(static_cast<int>(state.range(0)), 240, 8);
  for (auto _ : state) benchmark::DoNotOptimize(objective(in.y, in.a, in.g, 3));
}
BENCHMARK(BM_Objective)->Arg(64)->Arg(256)->Arg(1024);

void BM_Iterate(benchmark::State& state) {
  const Instance in = make(static_cast<int>(state.range(0)), 240, 8);
  for (auto _ : state) benchmark::DoNotOptimize(iterate(in.a, in.y, in.g, 3));
}
BENCHMARK(BM_Iterate)->Arg(64)->Arg(256)->Arg(1024);

void BM_Solve(benchmark::State& state) {
  const Instance in = make(256, 240, 8);
  for (auto _ : state) benchmark::DoNotOptimize(solve_from(in.y, in.g, SolverOptions{}, in.a));
}
BENCHMARK(BM_Solve)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
