// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>

#include "hmod/dnorm.hpp"
#include "hmod/experiments.hpp"
#include "hmod/heisenberg.hpp"
#include "hmod/torus.hpp"

using namespace hmod;

namespace {

void torus_apply(benchmark::State& state, Exec exec) {
  Rng rng(7);
  const TwistedSequence f = random_sequence(rng, 3, 12);
  const TorusApplier A(0.5 * (std::sqrt(5.0) - 1), f, static_cast<int>(state.range(0)));
  const std::size_t dim = Window(A.radius()).dim();
  std::vector<cplx> x(dim, cplx{1.0, 0.5}), y;
  for (auto _ : state) {
    A.apply(x, y, exec);
    benchmark::DoNotOptimize(y.data());
  }
}

void gram_rect(benchmark::State& state, bool parallel) {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  Rng rng(3);
  const WaveFunction xi = random_wave(rng, 1, 3);
  const long r = state.range(0);
  for (auto _ : state) {
    auto g = parallel ? gram_rect_parallel(ctx, xi, xi, -r, r + 1, -r, r + 1, {})
                      : gram_rect_serial(ctx, xi, xi, -r, r + 1, -r, r + 1, {});
    benchmark::DoNotOptimize(g);
  }
}

void dnorm_directions(benchmark::State& state, Exec exec) {
  const auto ctx = HeisenbergContext::make(0, 1, 1, 0.5);
  const auto samples = DirectionSample::make(3, 8);
  DNormOptions opt;
  opt.window = Window(4);
  opt.exec = exec;
  opt.gram.exec = exec;
  opt.power.exec = exec;
  opt.lower_only = true;
  for (auto _ : state) benchmark::DoNotOptimize(dnorm_estimate(ctx, ground_gaussian(), samples, opt));
}

}  // namespace

BENCHMARK_CAPTURE(torus_apply, serial, Exec::serial)->Arg(16)->Arg(64);
BENCHMARK_CAPTURE(torus_apply, parallel, Exec::parallel)->Arg(16)->Arg(64);
BENCHMARK_CAPTURE(gram_rect, serial, false)->Arg(4)->Arg(8);
BENCHMARK_CAPTURE(gram_rect, parallel, true)->Arg(4)->Arg(8);
BENCHMARK_CAPTURE(dnorm_directions, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(dnorm_directions, parallel, Exec::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
