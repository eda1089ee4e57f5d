#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mimo_switch/model.hpp"

namespace mimo_switch {

enum class Scheme {
  ItMseMin,
  ItRateMax,
  MmseRelayOnly,
  ZfNonPnc,
  ZfPnc,
  LowSnrAsymptotic,
  HighSnrAsymptoticMse,
  HighSnrAsymptoticRate,
};

const char* to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);
const std::vector<Scheme>& all_schemes();
// Mode a scheme always runs in, if it has one (baselines do).
std::optional<Mode> fixed_mode(Scheme scheme);

enum class PatternPolicy { AllDerangements, FixedPermutation, SymmetricOnly };
enum class PowerPolicy { Full, VertexOptimized };

PatternPolicy parse_pattern_policy(const std::string& name);
PowerPolicy parse_power_policy(const std::string& name);

struct SchemeRun {
  Scheme scheme;
  Mode mode;
};

struct SweepConfig {
  int users = 4;
  int antennas = 4;
  std::vector<double> snr_db;
  int trials = 1000;
  std::uint64_t seed = 42;
  std::vector<SchemeRun> runs;
  PatternPolicy patterns = PatternPolicy::AllDerangements;
  std::vector<int> fixed_permutation;  // 1-based; defaults to the cyclic shift i -> i+1
  PowerPolicy power = PowerPolicy::Full;
  int workers = 1;
  bool timing = false;  // wall_time_us stays 0 otherwise, keeping output byte-stable
};

struct SweepRecord {
  std::string scheme;
  bool pnc = false;
  double snr_db = 0.0;
  std::string pattern_id;
  int trial = 0;
  double sum_mse = 0.0;
  double sum_rate_bits = 0.0;
  int iterations = 0;
  bool converged = false;
  std::int64_t wall_time_us = 0;
  std::string error;  // empty unless the scheme failed
};

struct SchemeOutcome {
  double sum_mse = 0.0;
  double sum_rate_bits = 0.0;
  int iterations = 1;
  bool converged = true;
  RVector powers;
  std::vector<double> history;
  RelaySolution solution;
};

// High-SNR receivers depend on the channels only through scale when gamma^2 = sigma^2, so
// a sweep computes them once per (trial, pattern) and reuses them at every SNR.
class HighSnrCache {
 public:
  HighSnrCache(const Scenario& sc, const SwitchPattern& pat, int rounds = 100);

  std::pair<CVector, CVector> mse(Mode mode);
  std::pair<CVector, CVector> rate(Mode mode);

 private:
  Scenario reference_;
  SwitchPattern pat_;
  int rounds_;
  std::optional<std::pair<CVector, CVector>> mse_[2];
  std::optional<std::pair<CVector, CVector>> rate_[2];
};

// Runs one scheme on one scenario. The cache is used only when gamma^2 = sigma^2.
SchemeOutcome evaluate_scheme(Scheme scheme, Mode mode, const Scenario& sc, const SwitchPattern& pat,
                              PowerPolicy power = PowerPolicy::Full, HighSnrCache* cache = nullptr);

// Entries i.i.d. CN(0, 1).
std::pair<CMatrix, CMatrix> sample_rayleigh_channels(std::mt19937_64& rng, int antennas, int users);

// Generator for the channels of one trial, independent of scheduling.
std::mt19937_64 trial_rng(std::uint64_t seed, int trial);

struct DerangementEntry {
  SwitchPattern pattern;
  bool symmetric;
};

// Lexicographic order.
std::vector<DerangementEntry> enumerate_derangements(int users);

std::vector<SwitchPattern> sweep_patterns(const SweepConfig& cfg);

// a:b:c inclusive range in dB, or a single value.
std::vector<double> parse_snr_range(const std::string& text);

void validate(const SweepConfig& cfg);

// Records come out sorted by (run, snr, pattern, trial) whatever the worker count.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);
void run_sweep(const SweepConfig& cfg, const std::function<void(const SweepRecord&)>& sink);

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

struct SummaryRow {
  std::string scheme;
  bool pnc = false;
  double snr_db = 0.0;
  int count = 0;
  int failures = 0;
  Moments sum_mse;
  Moments sum_rate_bits;
  Moments iterations;
};

// Groups by (scheme, pnc, snr) in order of first appearance; failed records only count
// towards `failures`.
std::vector<SummaryRow> aggregate(const std::vector<SweepRecord>& records);

}  // namespace mimo_switch
