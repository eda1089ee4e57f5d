#include <benchmark/benchmark.h>

#include <cmath>

#include "mimo_switch/mimo_switch.hpp"

using namespace mimo_switch;

// range(0) is the SNR in dB, range(1) selects PNC.
static void BM_Algorithm1(benchmark::State& state) {
  auto rng = trial_rng(7, 0);
  auto [h, f] = sample_rayleigh_channels(rng, 4, 4);
  const Scenario sc = Scenario::unit_power(h, f, std::pow(10.0, -static_cast<double>(state.range(0)) / 10.0));
  const SwitchPattern pat = SwitchPattern::from_one_based({2, 3, 4, 1});
  const Mode mode = state.range(1) ? Mode::Pnc : Mode::NonPnc;
  int iterations = 0;
  for (auto _ : state) iterations = algorithm1(sc, pat, MseConfig{}, mode).iterations;
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_Algorithm1)->ArgsProduct({{0, 20}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_Algorithm2(benchmark::State& state) {
  auto rng = trial_rng(7, 0);
  auto [h, f] = sample_rayleigh_channels(rng, 4, 4);
  const Scenario sc = Scenario::unit_power(h, f, std::pow(10.0, -static_cast<double>(state.range(0)) / 10.0));
  const SwitchPattern pat = SwitchPattern::from_one_based({2, 3, 4, 1});
  const Mode mode = state.range(1) ? Mode::Pnc : Mode::NonPnc;
  int iterations = 0;
  for (auto _ : state) iterations = algorithm2(sc, pat, RateConfig{}, mode).iterations;
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_Algorithm2)->ArgsProduct({{0, 20}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_SweepTrial(benchmark::State& state) {
  SweepConfig cfg;
  cfg.snr_db = {0, 10, 20, 30};
  cfg.trials = 1;
  cfg.runs = {{Scheme::ItMseMin, Mode::Pnc}, {Scheme::ItRateMax, Mode::Pnc}, {Scheme::ZfPnc, Mode::Pnc}};
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg));
}
BENCHMARK(BM_SweepTrial)->Unit(benchmark::kMillisecond);
