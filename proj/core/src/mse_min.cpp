#include "mimo_switch/mse_min.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mimo_switch/asymptotics.hpp"
#include "mimo_switch/high_snr.hpp"
#include "mimo_switch/linalg.hpp"
#include "power_vertices.hpp"

namespace mimo_switch {
namespace {

void check_config(const MseConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw ContractViolation("epsilon must be positive");
  if (cfg.max_iter < 1) throw ContractViolation("max_iter must be at least 1");
}

void check_mode(const SwitchPattern& pat, Mode mode) {
  // The cross term between a receiver's own signal and its cancellation weight only
  // vanishes when nobody sends to itself.
  if (mode == Mode::Pnc && !pat.is_derangement())
    throw ContractViolation("PNC mode requires a derangement");
}

ReceiverFilters identity_filters(int k, Mode mode) {
  return ReceiverFilters{CVector::Zero(k), CVector::Ones(k), mode};
}

}  // namespace

RelaySolution weighted_mmse_precoder(const RVector& weights, const CVector& b, const CVector& c_bar,
                                     const Scenario& sc, const SwitchPattern& pat) {
  const int k = sc.users();
  if (weights.size() != k || b.size() != k || c_bar.size() != k)
    throw ContractViolation("filter vectors must have K entries");
  if (pat.size() != k) throw ContractViolation("pattern size differs from K");
  if (!b.allFinite() || !c_bar.allFinite()) throw ContractViolation("filters must be finite");

  const RVector wc = weights.cwiseProduct(c_bar.cwiseAbs2());
  if (!(wc.maxCoeff() > 0.0)) throw DegenerateSolution("all receive scalings are zero");
  const double kappa = sc.user_noise() / sc.relay_budget() * wc.sum();

  const CMatrix cf = c_bar.asDiagonal() * sc.downlink();  // K x N
  const CMatrix wcf = weights.cast<Complex>().asDiagonal() * cf;
  CMatrix lhs = cf.adjoint() * wcf;
  lhs.diagonal().array() += kappa;

  CMatrix target = pat.matrix().cast<Complex>();
  target.diagonal() += b;
  const CMatrix rhs =
      wcf.adjoint() * target * sc.powers().cast<Complex>().asDiagonal() * sc.uplink().adjoint();

  const CMatrix x = linalg::hermitian_solve(lhs, rhs);  // N x N
  CMatrix g_bar = linalg::right_hermitian_solve(x, relay_covariance(sc));
  if (g_bar.cwiseAbs().maxCoeff() == 0.0 || !g_bar.allFinite())
    throw DegenerateSolution("precoder update returned zero");
  return scale_to_budget(std::move(g_bar), sc);
}

RelaySolution update_precoder_mse(const ReceiverFilters& rf, const Scenario& sc,
                                  const SwitchPattern& pat) {
  return weighted_mmse_precoder(sc.mse_weights(), rf.b, rf.c_bar, sc, pat);
}

ReceiverFilters update_receivers_mse(const RelaySolution& sol, const Scenario& sc,
                                     const SwitchPattern& pat, Mode mode) {
  check_mode(pat, mode);
  const int k = sc.users();
  const FilteredSignals fs = filtered_signal_matrices(sol, sc, pat);
  ReceiverFilters rf{CVector::Zero(k), CVector(k), mode};
  if (mode == Mode::NonPnc) {
    for (int j = 0; j < k; ++j) rf.c_bar[j] = std::conj(fs.s[j]) / fs.d2[j];
    return rf;
  }
  const double floor = 1e-14 * fs.d2.maxCoeff();
  for (int j = 0; j < k; ++j) {
    double d3 = fs.d2[j] - sc.powers()[j] * std::norm(fs.d1[j]);
    if (d3 <= floor) d3 += floor;
    rf.c_bar[j] = std::conj(fs.s[j]) / d3;
    rf.b[j] = fs.d1[j] * rf.c_bar[j];
  }
  return rf;
}

ReceiverFilters initial_filters_mse(const Scenario& sc, const SwitchPattern& pat,
                                    const MseConfig& cfg, Mode mode) {
  check_mode(pat, mode);
  const int k = sc.users();
  const int n = sc.antennas();
  switch (cfg.init) {
    case InitKind::Explicit: {
      if (!cfg.initial) throw ContractViolation("explicit init requires initial filters");
      ReceiverFilters rf = *cfg.initial;
      if (rf.b.size() != k || rf.c_bar.size() != k)
        throw ContractViolation("initial filters must have K entries");
      rf.mode = mode;
      if (mode == Mode::NonPnc) rf.b.setZero();
      return rf;
    }
    case InitKind::Identity:
      return identity_filters(k, mode);
    case InitKind::ZeroForcing: {
      // Filters matched to the plain zero-forcing relay G = F^+ P H^+.
      if (n < k) return identity_filters(k, mode);
      const CMatrix g = high_snr_zf_precoder(sc, pat, CVector::Zero(k), CVector::Ones(k));
      return update_receivers_mse(scale_to_budget(g, sc), sc, pat, mode);
    }
    case InitKind::HighSnr:
      break;
  }
  if (n >= k) {
    const HighSnrChannelStats st = HighSnrChannelStats::from(sc);
    if (mode == Mode::NonPnc) return ReceiverFilters{CVector::Zero(k), non_pnc_mse_c(st, sc, pat), mode};
    const HighSnrReceivers hs = high_snr_mse_receivers(st, sc, pat, cfg.high_snr_rounds);
    return ReceiverFilters{hs.b, hs.c, mode};
  }
  if (n == k - 1 && mode == Mode::Pnc)
    return update_receivers_mse(null_space_precoder(sc, pat), sc, pat, mode);
  return identity_filters(k, mode);
}

MseTrace algorithm1(const Scenario& sc, const SwitchPattern& pat, const MseConfig& cfg, Mode mode) {
  check_config(cfg);
  check_mode(pat, mode);
  MseTrace trace;
  ReceiverFilters rf = initial_filters_mse(sc, pat, cfg, mode);
  RelaySolution sol = update_precoder_mse(rf, sc, pat);
  double current = weighted_sum_mse(sol, rf, sc, pat);
  trace.objective_history.push_back(current);
  trace.half_step_history.push_back(current);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    if (it > 1) {
      sol = update_precoder_mse(rf, sc, pat);
      trace.half_step_history.push_back(weighted_sum_mse(sol, rf, sc, pat));
    }
    rf = update_receivers_mse(sol, sc, pat, mode);
    const double next = weighted_sum_mse(sol, rf, sc, pat);
    trace.half_step_history.push_back(next);
    trace.objective_history.push_back(next);
    trace.iterations = it;
    const double decrease = current - next;
    current = next;
    if (decrease < cfg.epsilon) {
      trace.converged = true;
      break;
    }
  }
  trace.solution = std::move(sol);
  trace.receivers = std::move(rf);
  return trace;
}

PowerControlled<MseTrace> optimize_user_powers_mse(const Scenario& sc, const SwitchPattern& pat,
                                                   const MseConfig& cfg, Mode mode) {
  check_config(cfg);
  check_mode(pat, mode);
  detail::check_vertex_capacity(sc.users());
  const int k = sc.users();
  const Scenario full = sc.with_powers(sc.power_caps());

  PowerControlled<MseTrace> out;
  out.powers = full.powers();
  MseTrace& trace = out.trace;
  Scenario cur = full;
  ReceiverFilters rf = initial_filters_mse(cur, pat, cfg, mode);
  RelaySolution sol = update_precoder_mse(rf, cur, pat);
  double current = weighted_sum_mse(sol, rf, cur, pat);
  trace.objective_history.push_back(current);
  trace.half_step_history.push_back(current);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    if (it > 1) {
      sol = update_precoder_mse(rf, cur, pat);
      trace.half_step_history.push_back(weighted_sum_mse(sol, rf, cur, pat));
    }
    rf = update_receivers_mse(sol, cur, pat, mode);
    trace.half_step_history.push_back(weighted_sum_mse(sol, rf, cur, pat));

    // The objective and the relay power are both affine in q for fixed (G_bar, alpha, B, C_bar).
    const RVector zero = RVector::Zero(k);
    const double base = weighted_sum_mse(sol, rf, cur.with_powers(zero), pat);
    const double base_power = relay_tx_power(sol, cur.with_powers(zero));
    RVector slope(k), power_slope(k);
    for (int l = 0; l < k; ++l) {
      const double cap = sc.power_caps()[l];
      slope[l] = power_slope[l] = 0.0;
      if (cap == 0.0) continue;
      RVector e = zero;
      e[l] = cap;
      const Scenario unit = cur.with_powers(e);
      slope[l] = (weighted_sum_mse(sol, rf, unit, pat) - base) / cap;
      power_slope[l] = (relay_tx_power(sol, unit) - base_power) / cap;
    }
    const RVector best = detail::best_vertex(
        sc.power_caps(), cur.powers(), sc.relay_budget(),
        [&](const RVector& v) { return base + slope.dot(v); },
        [&](const RVector& v) { return base_power + power_slope.dot(v); }, /*maximize=*/false);
    cur = cur.with_powers(best);
    out.powers = best;

    const double next = weighted_sum_mse(sol, rf, cur, pat);
    trace.half_step_history.push_back(next);
    trace.objective_history.push_back(next);
    trace.iterations = it;
    const double decrease = current - next;
    current = next;
    // Every user silent: the objective is at its floor and no precoder carries information.
    if (best.isZero(0.0) || decrease < cfg.epsilon) {
      trace.converged = true;
      break;
    }
  }
  trace.solution = std::move(sol);
  trace.receivers = std::move(rf);
  return out;
}

}  // namespace mimo_switch
