#include "mimo_switch/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "mimo_switch/asymptotics.hpp"
#include "mimo_switch/baselines.hpp"
#include "mimo_switch/high_snr.hpp"
#include "mimo_switch/mse_min.hpp"
#include "mimo_switch/rate_max.hpp"

namespace mimo_switch {
namespace {

struct SchemeInfo {
  Scheme scheme;
  const char* name;
  std::optional<Mode> mode;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<SchemeInfo>& scheme_table() {
  static const std::vector<SchemeInfo> table{
      {Scheme::ItMseMin, "it-mse-min", std::nullopt},
      {Scheme::ItRateMax, "it-rate-max", std::nullopt},
      {Scheme::MmseRelayOnly, "mmse-relay-only", Mode::NonPnc},
      {Scheme::ZfNonPnc, "zf-non-pnc", Mode::NonPnc},
      {Scheme::ZfPnc, "zf-pnc", Mode::Pnc},
      {Scheme::LowSnrAsymptotic, "low-snr-asymptotic", std::nullopt},
      {Scheme::HighSnrAsymptoticMse, "high-snr-asymptotic-mse", std::nullopt},
      {Scheme::HighSnrAsymptoticRate, "high-snr-asymptotic-rate", std::nullopt},
  };
  return table;
}

// MSE of G with the receivers that are optimal for it.
double mse_with_optimal_receivers(const RelaySolution& sol, const Scenario& sc,
                                  const SwitchPattern& pat, Mode mode) {
  return weighted_sum_mse(sol, update_receivers_mse(sol, sc, pat, mode), sc, pat);
}

double rate_of(const RelaySolution& sol, const Scenario& sc, const SwitchPattern& pat, Mode mode) {
  const CMatrix g = sol.precoder();
  return weighted_sum_rate(g, cancellation_for(mode, g, sc), sc, pat);
}

bool reusable(const Scenario& sc, HighSnrCache* cache) {
  return cache != nullptr && sc.relay_noise() == sc.user_noise();
}

std::pair<CVector, CVector> high_snr_pair(const Scenario& sc, const SwitchPattern& pat, Mode mode,
                                          bool rate, HighSnrCache* cache) {
  if (reusable(sc, cache)) return rate ? cache->rate(mode) : cache->mse(mode);
  HighSnrCache local(sc, pat);
  return rate ? local.rate(mode) : local.mse(mode);
}

// Zero-forcing precoder from high-SNR receivers when N >= K; the null-space precoder when
// N = K - 1 in PNC mode.
RelaySolution high_snr_relay(const Scenario& sc, const SwitchPattern& pat, Mode mode, bool rate,
                             HighSnrCache* cache) {
  if (sc.antennas() >= sc.users()) {
    const auto [b, c] = high_snr_pair(sc, pat, mode, rate, cache);
    return scale_to_budget(high_snr_zf_precoder(sc, pat, b, c), sc);
  }
  if (sc.antennas() == sc.users() - 1 && mode == Mode::Pnc) return null_space_precoder(sc, pat);
  throw CapabilityError("high-SNR solutions need N >= K, or N = K - 1 with PNC");
}

SchemeOutcome from_relay(const RelaySolution& sol, const Scenario& sc, const SwitchPattern& pat,
                         Mode mode) {
  SchemeOutcome out;
  out.solution = sol;
  out.powers = sc.powers();
  out.sum_mse = mse_with_optimal_receivers(sol, sc, pat, mode);
  out.sum_rate_bits = rate_of(sol, sc, pat, mode);
  return out;
}

}  // namespace

const char* to_string(Scheme scheme) {
  for (const auto& s : scheme_table())
    if (s.scheme == scheme) return s.name;
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  for (const auto& s : scheme_table())
    if (name == s.name) return s.scheme;
  std::string known;
  for (const auto& s : scheme_table()) known += (known.empty() ? "" : ", ") + std::string(s.name);
  throw ContractViolation("unknown scheme '" + name + "'; available: " + known);
}

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> list = [] {
    std::vector<Scheme> v;
    for (const auto& s : scheme_table()) v.push_back(s.scheme);
    return v;
  }();
  return list;
}

std::optional<Mode> fixed_mode(Scheme scheme) {
  for (const auto& s : scheme_table())
    if (s.scheme == scheme) return s.mode;
  return std::nullopt;
}

PatternPolicy parse_pattern_policy(const std::string& name) {
  if (name == "all-derangements") return PatternPolicy::AllDerangements;
  if (name == "fixed-permutation") return PatternPolicy::FixedPermutation;
  if (name == "symmetric-only") return PatternPolicy::SymmetricOnly;
  throw ContractViolation("unknown pattern policy '" + name + "'");
}

PowerPolicy parse_power_policy(const std::string& name) {
  if (name == "full") return PowerPolicy::Full;
  if (name == "vertex-optimized") return PowerPolicy::VertexOptimized;
  throw ContractViolation("unknown power policy '" + name + "'");
}

HighSnrCache::HighSnrCache(const Scenario& sc, const SwitchPattern& pat, int rounds)
    : reference_(sc.relay_noise() == sc.user_noise() ? sc.with_noise(1.0, 1.0) : sc),
      pat_(pat),
      rounds_(rounds) {}

std::pair<CVector, CVector> HighSnrCache::mse(Mode mode) {
  auto& slot = mse_[mode == Mode::Pnc ? 0 : 1];
  if (!slot) {
    const HighSnrChannelStats st = HighSnrChannelStats::from(reference_);
    if (mode == Mode::Pnc) {
      const HighSnrReceivers hs = high_snr_mse_receivers(st, reference_, pat_, rounds_);
      slot.emplace(hs.b, hs.c);
    } else {
      slot.emplace(CVector::Zero(reference_.users()), non_pnc_mse_c(st, reference_, pat_));
    }
  }
  return *slot;
}

std::pair<CVector, CVector> HighSnrCache::rate(Mode mode) {
  auto& slot = rate_[mode == Mode::Pnc ? 0 : 1];
  if (!slot) {
    const HighSnrChannelStats st = HighSnrChannelStats::from(reference_);
    if (mode == Mode::Pnc) {
      const HighSnrReceivers hs = high_snr_rate_receivers(st, reference_, pat_, rounds_);
      slot.emplace(hs.b, hs.c);
    } else {
      slot.emplace(CVector::Zero(reference_.users()), non_pnc_rate_c(st, reference_, pat_));
    }
  }
  return *slot;
}

SchemeOutcome evaluate_scheme(Scheme scheme, Mode mode, const Scenario& sc, const SwitchPattern& pat,
                              PowerPolicy power, HighSnrCache* cache) {
  if (auto m = fixed_mode(scheme)) mode = *m;
  const bool full_rank_relay = sc.antennas() >= sc.users();
  switch (scheme) {
    case Scheme::ItMseMin: {
      MseConfig cfg;
      if (full_rank_relay) {
        const auto [b, c] = high_snr_pair(sc, pat, mode, false, cache);
        cfg.init = InitKind::Explicit;
        cfg.initial = ReceiverFilters{b, c, mode};
      }
      SchemeOutcome out;
      const Scenario* used = &sc;
      std::optional<Scenario> controlled;
      MseTrace trace;
      if (power == PowerPolicy::VertexOptimized) {
        auto pc = optimize_user_powers_mse(sc, pat, cfg, mode);
        controlled.emplace(sc.with_powers(pc.powers));
        used = &*controlled;
        trace = std::move(pc.trace);
      } else {
        trace = algorithm1(sc, pat, cfg, mode);
      }
      out.solution = trace.solution;
      out.powers = used->powers();
      out.sum_mse = trace.objective_history.back();
      out.sum_rate_bits = rate_of(trace.solution, *used, pat, mode);
      out.iterations = trace.iterations;
      out.converged = trace.converged;
      out.history = std::move(trace.objective_history);
      return out;
    }
    case Scheme::ItRateMax: {
      RateConfig cfg;
      if (full_rank_relay) {
        cfg.init = InitKind::Explicit;
        cfg.initial_relay = high_snr_relay(sc, pat, mode, true, cache);
      }
      SchemeOutcome out;
      const Scenario* used = &sc;
      std::optional<Scenario> controlled;
      RateTrace trace;
      if (power == PowerPolicy::VertexOptimized) {
        auto pc = optimize_user_powers_rate(sc, pat, cfg, mode);
        controlled.emplace(sc.with_powers(pc.powers));
        used = &*controlled;
        trace = std::move(pc.trace);
      } else {
        trace = algorithm2(sc, pat, cfg, mode);
      }
      out.solution = trace.solution;
      out.powers = used->powers();
      out.sum_rate_bits = trace.objective_history.back();
      out.sum_mse = mse_with_optimal_receivers(trace.solution, *used, pat, mode);
      out.iterations = trace.iterations;
      out.converged = trace.converged;
      out.history = std::move(trace.objective_history);
      return out;
    }
    case Scheme::MmseRelayOnly: {
      const RelaySolution sol = mmse_relay_only(sc, pat);
      SchemeOutcome out = from_relay(sol, sc, pat, mode);
      out.sum_mse = weighted_sum_mse(sol, mmse_relay_only_filters(sc.users()), sc, pat);
      return out;
    }
    case Scheme::ZfNonPnc:
    case Scheme::ZfPnc: {
      if (!full_rank_relay) throw CapabilityError("zero-forcing needs N >= K");
      const auto [b, c] = high_snr_pair(sc, pat, mode, false, cache);
      const ZfSolution zf = zf_from_receivers(sc, pat, mode, b, c);
      SchemeOutcome out = from_relay(zf.solution, sc, pat, mode);
      out.sum_mse = weighted_sum_mse(zf.solution, zf.filters, sc, pat);
      return out;
    }
    case Scheme::LowSnrAsymptotic:
      return from_relay(low_snr_precoder(sc, pat), sc, pat, mode);
    case Scheme::HighSnrAsymptoticMse:
      return from_relay(high_snr_relay(sc, pat, mode, false, cache), sc, pat, mode);
    case Scheme::HighSnrAsymptoticRate:
      return from_relay(high_snr_relay(sc, pat, mode, true, cache), sc, pat, mode);
  }
  throw ContractViolation("unhandled scheme");
}

std::pair<CMatrix, CMatrix> sample_rayleigh_channels(std::mt19937_64& rng, int antennas, int users) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  auto draw = [&](int rows, int cols) {
    CMatrix m(rows, cols);
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) {
        const double re = normal(rng);
        const double im = normal(rng);
        m(r, c) = Complex(re, im);
      }
    return m;
  };
  CMatrix h = draw(antennas, users);
  CMatrix f = draw(users, antennas);
  return {std::move(h), std::move(f)};
}

std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), 0x6d696d6fu};
  return std::mt19937_64(seq);
}

std::vector<DerangementEntry> enumerate_derangements(int users) {
  if (users < 2) throw ContractViolation("derangements need at least two users");
  if (users > 10) throw CapabilityError("derangement enumeration is limited to K <= 10");
  std::vector<int> perm(users);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<DerangementEntry> out;
  do {
    bool fixed = false;
    for (int i = 0; i < users && !fixed; ++i) fixed = perm[i] == i;
    if (fixed) continue;
    SwitchPattern pat(perm);
    const bool sym = pat.is_symmetric();
    out.push_back(DerangementEntry{std::move(pat), sym});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<SwitchPattern> sweep_patterns(const SweepConfig& cfg) {
  std::vector<SwitchPattern> out;
  if (cfg.patterns == PatternPolicy::FixedPermutation) {
    if (cfg.fixed_permutation.empty()) {
      std::vector<int> shift(cfg.users);
      for (int i = 0; i < cfg.users; ++i) shift[i] = (i + 1) % cfg.users;
      out.emplace_back(shift);
    } else {
      if (static_cast<int>(cfg.fixed_permutation.size()) != cfg.users)
        throw ContractViolation("fixed permutation must have K entries");
      out.push_back(SwitchPattern::from_one_based(cfg.fixed_permutation));
    }
    return out;
  }
  for (auto& d : enumerate_derangements(cfg.users))
    if (cfg.patterns == PatternPolicy::AllDerangements || d.symmetric) out.push_back(std::move(d.pattern));
  if (out.empty()) throw ContractViolation("pattern policy selects no pattern for this K");
  return out;
}

std::vector<double> parse_snr_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ContractViolation("bad SNR range '" + text + "'");
    }
    if (used != item.size()) throw ContractViolation("bad SNR range '" + text + "'");
    parts.push_back(v);
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0])
    throw ContractViolation("SNR range must be start:step:stop with step > 0");
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9)) + 1;
  for (int n = 0; n < count; ++n) out.push_back(parts[0] + n * parts[1]);
  return out;
}

void validate(const SweepConfig& cfg) {
  if (cfg.users < 2) throw ContractViolation("need at least two users");
  if (cfg.antennas < 1) throw ContractViolation("need at least one relay antenna");
  if (cfg.trials < 1) throw ContractViolation("trials must be at least 1");
  if (cfg.snr_db.empty()) throw ContractViolation("SNR list is empty");
  if (cfg.runs.empty()) throw ContractViolation("no schemes selected");
  if (cfg.workers < 1) throw ContractViolation("workers must be at least 1");
  for (double s : cfg.snr_db)
    if (!std::isfinite(s)) throw ContractViolation("SNR values must be finite");
}

void run_sweep(const SweepConfig& cfg, const std::function<void(const SweepRecord&)>& sink) {
  validate(cfg);
  const std::vector<SwitchPattern> patterns = sweep_patterns(cfg);
  for (const auto& run : cfg.runs) {
    const Mode mode = fixed_mode(run.scheme).value_or(run.mode);
    for (const auto& pat : patterns)
      if (mode == Mode::Pnc && !pat.is_derangement())
        throw ContractViolation("PNC runs need derangement patterns");
  }

  const int n_pat = static_cast<int>(patterns.size());
  const int n_snr = static_cast<int>(cfg.snr_db.size());
  const int n_run = static_cast<int>(cfg.runs.size());
  const int n_tasks = cfg.trials * n_pat;
  // Slot per (task, run, snr), filled independently by the workers.
  std::vector<SweepRecord> slots(static_cast<std::size_t>(n_tasks) * n_run * n_snr);
  auto slot = [&](int task, int run, int snr) -> SweepRecord& {
    return slots[(static_cast<std::size_t>(task) * n_run + run) * n_snr + snr];
  };

  auto work = [&](int task) {
    const int trial = task / n_pat;
    const SwitchPattern& pat = patterns[task % n_pat];
    std::mt19937_64 rng = trial_rng(cfg.seed, trial);
    auto [h, f] = sample_rayleigh_channels(rng, cfg.antennas, cfg.users);
    std::optional<HighSnrCache> cache;
    for (int s = 0; s < n_snr; ++s) {
      const double noise = std::pow(10.0, -cfg.snr_db[s] / 10.0);
      std::optional<Scenario> sc;
      std::string scenario_error;
      try {
        sc.emplace(Scenario::unit_power(h, f, noise));
        if (!cache) cache.emplace(*sc, pat);
      } catch (const std::exception& e) {
        scenario_error = e.what();
      }
      for (int r = 0; r < n_run; ++r) {
        const SchemeRun& run = cfg.runs[r];
        const Mode mode = fixed_mode(run.scheme).value_or(run.mode);
        SweepRecord& rec = slot(task, r, s);
        rec.scheme = to_string(run.scheme);
        rec.pnc = mode == Mode::Pnc;
        rec.snr_db = cfg.snr_db[s];
        rec.pattern_id = pat.id();
        rec.trial = trial;
        const auto start = std::chrono::steady_clock::now();
        try {
          if (!sc) throw ContractViolation(scenario_error);
          const SchemeOutcome o = evaluate_scheme(run.scheme, mode, *sc, pat, cfg.power, &*cache);
          rec.sum_mse = o.sum_mse;
          rec.sum_rate_bits = o.sum_rate_bits;
          rec.iterations = o.iterations;
          rec.converged = o.converged;
        } catch (const std::exception& e) {
          rec.sum_mse = kNaN;
          rec.sum_rate_bits = kNaN;
          rec.iterations = 0;
          rec.converged = false;
          rec.error = e.what();
        }
        if (cfg.timing)
          rec.wall_time_us = std::chrono::duration_cast<std::chrono::microseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
      }
    }
  };

  const int workers = std::min(cfg.workers, n_tasks);
  if (workers <= 1) {
    for (int t = 0; t < n_tasks; ++t) work(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int t = next++; t < n_tasks; t = next++) work(t);
      });
    for (auto& th : pool) th.join();
  }

  for (int r = 0; r < n_run; ++r)
    for (int s = 0; s < n_snr; ++s)
      for (int p = 0; p < n_pat; ++p)
        for (int trial = 0; trial < cfg.trials; ++trial) sink(slot(trial * n_pat + p, r, s));
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  std::vector<SweepRecord> out;
  run_sweep(cfg, [&](const SweepRecord& r) { out.push_back(r); });
  return out;
}

std::vector<SummaryRow> aggregate(const std::vector<SweepRecord>& records) {
  struct Acc {
    SummaryRow row;
    std::vector<double> mse, rate, iters;
  };
  std::vector<Acc> groups;
  std::map<std::tuple<std::string, bool, double>, std::size_t> index;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.scheme, r.pnc, r.snr_db);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      Acc acc;
      acc.row.scheme = r.scheme;
      acc.row.pnc = r.pnc;
      acc.row.snr_db = r.snr_db;
      groups.push_back(std::move(acc));
    }
    Acc& acc = groups[it->second];
    const bool failed = !std::isfinite(r.sum_mse) || !std::isfinite(r.sum_rate_bits) || !r.error.empty();
    if (failed) {
      ++acc.row.failures;
      continue;
    }
    ++acc.row.count;
    acc.mse.push_back(r.sum_mse);
    acc.rate.push_back(r.sum_rate_bits);
    acc.iters.push_back(r.iterations);
  }
  auto moments = [](const std::vector<double>& v) {
    Moments m;
    if (v.empty()) {
      m.mean = m.std = kNaN;
      return m;
    }
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - m.mean) * (x - m.mean);
      m.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return m;
  };
  std::vector<SummaryRow> out;
  for (auto& g : groups) {
    g.row.sum_mse = moments(g.mse);
    g.row.sum_rate_bits = moments(g.rate);
    g.row.iterations = moments(g.iters);
    out.push_back(std::move(g.row));
  }
  return out;
}

}  // namespace mimo_switch
