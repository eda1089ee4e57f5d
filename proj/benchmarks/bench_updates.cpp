#include <benchmark/benchmark.h>

#include <cmath>

#include "mimo_switch/mimo_switch.hpp"

using namespace mimo_switch;

namespace {

Scenario rayleigh(int users, double snr_db, std::uint64_t seed = 1) {
  auto rng = trial_rng(seed, 0);
  auto [h, f] = sample_rayleigh_channels(rng, users, users);
  return Scenario::unit_power(h, f, std::pow(10.0, -snr_db / 10.0));
}

SwitchPattern cyclic(int users) {
  std::vector<int> perm(users);
  for (int i = 0; i < users; ++i) perm[i] = (i + 1) % users;
  return SwitchPattern(perm);
}

}  // namespace

static void BM_PrecoderUpdate(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Scenario sc = rayleigh(k, 20.0);
  const SwitchPattern pat = cyclic(k);
  const ReceiverFilters rf{CVector::Constant(k, 0.1), CVector::Ones(k), Mode::Pnc};
  for (auto _ : state) benchmark::DoNotOptimize(update_precoder_mse(rf, sc, pat));
}
BENCHMARK(BM_PrecoderUpdate)->Arg(2)->Arg(4)->Arg(8);

static void BM_ReceiverUpdate(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Scenario sc = rayleigh(k, 20.0);
  const SwitchPattern pat = cyclic(k);
  const RelaySolution sol = update_precoder_mse(ReceiverFilters{CVector::Zero(k), CVector::Ones(k), Mode::Pnc}, sc, pat);
  for (auto _ : state) benchmark::DoNotOptimize(update_receivers_mse(sol, sc, pat, Mode::Pnc));
}
BENCHMARK(BM_ReceiverUpdate)->Arg(2)->Arg(4)->Arg(8);

static void BM_LowSnrPrecoder(benchmark::State& state) {
  const Scenario sc = rayleigh(4, -30.0);
  const SwitchPattern pat = cyclic(4);
  for (auto _ : state) benchmark::DoNotOptimize(low_snr_precoder(sc, pat));
}
BENCHMARK(BM_LowSnrPrecoder);

static void BM_HighSnrReceivers(benchmark::State& state) {
  const Scenario sc = rayleigh(4, 30.0);
  const SwitchPattern pat = cyclic(4);
  const HighSnrChannelStats st = HighSnrChannelStats::from(sc);
  const bool rate = state.range(0) != 0;
  for (auto _ : state) {
    if (rate)
      benchmark::DoNotOptimize(high_snr_rate_receivers(st, sc, pat));
    else
      benchmark::DoNotOptimize(high_snr_mse_receivers(st, sc, pat));
  }
}
BENCHMARK(BM_HighSnrReceivers)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
