#include <benchmark/benchmark.h>

#include "nmit/oracle.hpp"
#include "nmit/presets.hpp"
#include "nmit/response.hpp"
#include "nmit/sweep.hpp"

namespace {

void BM_SidebandSolve(benchmark::State& state) {
  auto p = nmit::preset_params(state.range(0) ? nmit::Preset::fig5 : nmit::Preset::fig2);
  const auto op = nmit::make_operating_point(p);
  double delta = 0.5 * op.steady.omega_n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nmit::solve_sideband_system(op, delta));
    delta += 1e-3;
  }
}
BENCHMARK(BM_SidebandSolve)->Arg(0)->Arg(1);

void BM_SteadyStateAutoDetuning(benchmark::State& state) {
  const auto p = nmit::preset_params(nmit::Preset::fig5);
  for (auto _ : state) benchmark::DoNotOptimize(nmit::make_operating_point(p));
}
BENCHMARK(BM_SteadyStateAutoDetuning);

void BM_SelfConsistentTrap(benchmark::State& state) {
  auto p = nmit::preset_params(nmit::Preset::fig2);
  p.delta_d = nmit::make_operating_point(p).steady.delta_d;
  const auto d = nmit::derive(p);
  const double sigma = nmit::solve_prescribed(d, p, 0.1).sigma_implied;
  for (auto _ : state) benchmark::DoNotOptimize(nmit::solve_selfconsistent(d, p, sigma));
}
BENCHMARK(BM_SelfConsistentTrap);

void BM_Sweep(benchmark::State& state) {
  auto spec = nmit::preset_sweep(nmit::Preset::fig5);
  spec.axis1 = nmit::SweepAxis::linspace(nmit::AxisName::delta_over_omega_n, -2.0, 2.0, 201);
  const auto p = nmit::preset_params(nmit::Preset::fig5);
  for (auto _ : state) benchmark::DoNotOptimize(nmit::run_sweep(spec, p, 1));
  state.SetItemsProcessed(state.iterations() * 201 * 4);
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

void BM_OracleOnePoint(benchmark::State& state) {
  const auto op = nmit::make_operating_point(nmit::preset_params(nmit::Preset::fig2));
  for (auto _ : state) benchmark::DoNotOptimize(nmit::demodulated_response(op, op.steady.omega_n));
}
BENCHMARK(BM_OracleOnePoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
