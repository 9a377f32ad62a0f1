#include <benchmark/benchmark.h>

#include "cavpulse/analysis.hpp"
#include "cavpulse/dephasing.hpp"
#include "cavpulse/energetics.hpp"
#include "cavpulse/radiation.hpp"

using namespace cavpulse;

namespace {

CavityConfig figure(double alpha_eff, double theta) {
  RawParameters p;
  p.K = 3;
  p.omega = 1.0;
  p.r = 0.9;
  p.R1 = 1.0;
  p.alpha_eff = alpha_eff;
  p.theta = theta;
  return validate_config(p);
}

}  // namespace

static void BM_Dephasing(benchmark::State& state) {
  const CavityConfig cfg = figure(0.9, 0.0);
  const int p = static_cast<int>(state.range(0));
  double u = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dephasing(u, p, cfg));
    u += 1e-3;
  }
}
BENCHMARK(BM_Dephasing)->Arg(1)->Arg(40)->Arg(400);

static void BM_EnergyDensity(benchmark::State& state) {
  const CavityConfig cfg = figure(static_cast<double>(state.range(0)) / 10.0, 3924.0);
  const double t = pulse_center(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(energy_density(t, cfg));
}
BENCHMARK(BM_EnergyDensity)->Arg(5)->Arg(9);

static void BM_SamplePeriod(benchmark::State& state) {
  const CavityConfig cfg = figure(0.9, 3924.0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_period(cfg, static_cast<int>(state.range(0)), {}, 1));
}
BENCHMARK(BM_SamplePeriod)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_FFactor(benchmark::State& state) {
  const double theta = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(F_factor(theta, 2, 1.0));
}
BENCHMARK(BM_FFactor)->Arg(1)->Arg(10)->Arg(3924);

BENCHMARK_MAIN();
