#include "mimo_switch/rate_max.hpp"

#include "mimo_switch/asymptotics.hpp"
#include "mimo_switch/high_snr.hpp"
#include "power_vertices.hpp"

namespace mimo_switch {
namespace {

void check_config(const RateConfig& cfg) {
  if (!(cfg.delta_tol > 0.0)) throw ContractViolation("delta_tol must be positive");
  if (cfg.max_iter < 1) throw ContractViolation("max_iter must be at least 1");
}

void check_mode(const SwitchPattern& pat, Mode mode) {
  if (mode == Mode::Pnc && !pat.is_derangement())
    throw ContractViolation("PNC mode requires a derangement");
}

// Starting precoder for the rate iteration.
RelaySolution initial_precoder(const Scenario& sc, const SwitchPattern& pat, const RateConfig& cfg,
                               Mode mode) {
  const int k = sc.users();
  const int n = sc.antennas();
  switch (cfg.init) {
    case InitKind::Explicit: {
      if (cfg.initial_relay) return scale_to_budget(cfg.initial_relay->g_bar, sc);
      if (!cfg.initial) throw ContractViolation("explicit init requires an initial state");
      return update_precoder_rate(*cfg.initial, sc, pat);
    }
    case InitKind::Identity: {
      const RateReceiverState state{CVector::Zero(k), CVector::Ones(k), sc.powers()};
      return update_precoder_rate(state, sc, pat);
    }
    case InitKind::ZeroForcing:
      if (n >= k)
        return scale_to_budget(high_snr_zf_precoder(sc, pat, CVector::Zero(k), CVector::Ones(k)), sc);
      break;
    case InitKind::HighSnr:
      if (n >= k) {
        const HighSnrChannelStats st = HighSnrChannelStats::from(sc);
        if (mode == Mode::NonPnc) {
          const CVector c = non_pnc_rate_c(st, sc, pat);
          return scale_to_budget(high_snr_zf_precoder(sc, pat, CVector::Zero(k), c), sc);
        }
        const HighSnrReceivers hs = high_snr_rate_receivers(st, sc, pat, cfg.high_snr_rounds);
        return scale_to_budget(high_snr_zf_precoder(sc, pat, hs.b, hs.c), sc);
      }
      if (n == k - 1 && mode == Mode::Pnc) return null_space_precoder(sc, pat);
      break;
  }
  const RateReceiverState state{CVector::Zero(k), CVector::Ones(k), sc.powers()};
  return update_precoder_rate(state, sc, pat);
}

double true_rate(const RelaySolution& sol, const Scenario& sc, const SwitchPattern& pat, Mode mode) {
  const CMatrix g = sol.precoder();
  return weighted_sum_rate(g, cancellation_for(mode, g, sc), sc, pat);
}

}  // namespace

RelaySolution update_precoder_rate(const RateReceiverState& state, const Scenario& sc,
                                   const SwitchPattern& pat) {
  const int k = sc.users();
  if (state.delta_bar.size() != k || state.omega_bar.size() != k || state.sigma_post.size() != k)
    throw ContractViolation("receiver state must have K entries");
  RVector weff = RVector::Zero(k);
  for (int j = 0; j < k; ++j) {
    const int i = pat.sender_to(j);
    if (sc.powers()[i] == 0.0) continue;
    if (!(state.sigma_post[j] > 0.0)) throw ContractViolation("posterior variance must be positive");
    weff[j] = sc.rate_weights()[i] / state.sigma_post[j];
  }
  const CVector b = state.omega_bar.cwiseProduct(state.delta_bar);
  return weighted_mmse_precoder(weff, b, state.omega_bar, sc, pat);
}

RateReceiverState update_receivers_rate(const RelaySolution& sol, const Scenario& sc,
                                        const SwitchPattern& pat, Mode mode) {
  check_mode(pat, mode);
  const CMatrix g = sol.precoder();
  const CVector delta = cancellation_for(mode, g, sc);
  const MmseStatistics st = mmse_receiver_stats(g, delta, sc, pat);
  return RateReceiverState{delta / sol.alpha, st.omega * sol.alpha, st.sigma_post};
}

RateTrace algorithm2(const Scenario& sc, const SwitchPattern& pat, const RateConfig& cfg, Mode mode) {
  check_config(cfg);
  check_mode(pat, mode);
  RateTrace trace;
  RelaySolution sol = initial_precoder(sc, pat, cfg, mode);
  RateReceiverState state = update_receivers_rate(sol, sc, pat, mode);
  double current = true_rate(sol, sc, pat, mode);
  trace.objective_history.push_back(current);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    sol = update_precoder_rate(state, sc, pat);
    state = update_receivers_rate(sol, sc, pat, mode);
    const double next = true_rate(sol, sc, pat, mode);
    trace.objective_history.push_back(next);
    trace.iterations = it;
    const double increase = next - current;
    current = next;
    if (increase < cfg.delta_tol) {
      trace.converged = true;
      break;
    }
  }
  trace.solution = std::move(sol);
  trace.receivers = std::move(state);
  return trace;
}

PowerControlled<RateTrace> optimize_user_powers_rate(const Scenario& sc, const SwitchPattern& pat,
                                                     const RateConfig& cfg, Mode mode) {
  check_config(cfg);
  check_mode(pat, mode);
  detail::check_vertex_capacity(sc.users());

  PowerControlled<RateTrace> out;
  RateTrace& trace = out.trace;
  Scenario cur = sc.with_powers(sc.power_caps());
  RelaySolution sol = initial_precoder(cur, pat, cfg, mode);
  RateReceiverState state;
  double current = true_rate(sol, cur, pat, mode);
  trace.objective_history.push_back(current);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    state = update_receivers_rate(sol, cur, pat, mode);
    sol = update_precoder_rate(state, cur, pat);
    // For fixed G the reported rate is evaluated with receivers re-matched to each vertex.
    const CMatrix g = sol.precoder();
    const CVector delta = cancellation_for(mode, g, cur);
    const RVector best = detail::best_vertex(
        sc.power_caps(), cur.powers(), sc.relay_budget(),
        [&](const RVector& v) { return weighted_sum_rate(g, delta, cur.with_powers(v), pat); },
        [&](const RVector& v) { return relay_tx_power(g, cur.with_powers(v)); }, /*maximize=*/true);
    cur = cur.with_powers(best);
    state = update_receivers_rate(sol, cur, pat, mode);

    const double next = true_rate(sol, cur, pat, mode);
    trace.objective_history.push_back(next);
    trace.iterations = it;
    const double increase = next - current;
    current = next;
    if (increase < cfg.delta_tol) {
      trace.converged = true;
      break;
    }
  }
  out.powers = cur.powers();
  trace.solution = std::move(sol);
  trace.receivers = std::move(state);
  return out;
}

}  // namespace mimo_switch
