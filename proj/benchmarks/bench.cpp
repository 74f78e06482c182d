#include <benchmark/benchmark.h>

#include <robustpr/ensemble.hpp>
#include <robustpr/gradient.hpp>
#include <robustpr/prox_half.hpp>
#include <robustpr/random.hpp>
#include <robustpr/solver.hpp>
#include <robustpr/spectral.hpp>

using namespace robustpr;

namespace {

void BM_HalfThreshold(benchmark::State& state) {
  const Index p = state.range(0);
  Rng rng(1);
  RealVector xi(p);
  for (Index j = 0; j < p; ++j) xi[j] = rng.normal();
  const Signal x(xi);
  for (auto _ : state) benchmark::DoNotOptimize(half_threshold(x, 0.5));
  state.SetItemsProcessed(state.iterations() * p);
}
BENCHMARK(BM_HalfThreshold)->Arg(128)->Arg(4096);

void BM_Gradient(benchmark::State& state) {
  const Index p = state.range(0);
  const FieldTag field = state.range(1) ? FieldTag::Complex : FieldTag::Real;
  const auto e = synthesize_instance(p, p / 10 + 1, 6 * p, field, parse_noise("type2:0.1"), 2);
  const Signal x = generate_signal(p, p, field, 3);
  for (auto _ : state) benchmark::DoNotOptimize(g(x, e, 1.345));
}
BENCHMARK(BM_Gradient)->Args({128, 0})->Args({128, 1})->Args({512, 0});

void BM_Spectral(benchmark::State& state) {
  const Index p = state.range(0);
  const auto e = synthesize_instance(p, 12, 6 * p, FieldTag::Real, NoiseSpec::none(), 4);
  const auto cfg = default_spectral_config(FieldTag::Real, p, 12);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_init(e, cfg, 5));
}
BENCHMARK(BM_Spectral)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const Index p = state.range(0);
  const auto e = synthesize_instance(p, 12, 6 * p, FieldTag::Real, parse_noise("type1:0.1"), 6);
  const Signal x0 = spectral_init(e, default_spectral_config(FieldTag::Real, p, 12), 6).estimate;
  SolverConfig cfg;
  cfg.lambda = 1e-3;
  for (auto _ : state) {
    const auto result = solve(e, x0, cfg);
    state.counters["iterations"] = result.iterations();
  }
}
BENCHMARK(BM_Solve)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
