#pragma once

#include <vector>

#include "mimo_switch/scenario.hpp"
#include "mimo_switch/switch_pattern.hpp"
#include "mimo_switch/types.hpp"

namespace mimo_switch {

// G = alpha * g_bar, with alpha chosen to meet the relay budget.
struct RelaySolution {
  CMatrix g_bar;
  double alpha = 1.0;

  CMatrix precoder() const { return alpha * g_bar; }
};

// Diagonals of B and C_bar = alpha * C.
struct ReceiverFilters {
  CVector b;
  CVector c_bar;
  Mode mode = Mode::Pnc;
};

// Diagonals of Delta_bar, Omega_bar and Sigma; entries indexed by receiver.
struct RateReceiverState {
  CVector delta_bar;
  CVector omega_bar;
  RVector sigma_post;
};

// MMSE estimator coefficients omega_j and posterior variances Sigma_j, indexed by receiver.
struct MmseStatistics {
  CVector omega;
  RVector sigma_post;
};

struct FilteredSignals {
  CVector d1;
  RVector d2;
  CVector s;
};

template <class Receivers>
struct SolveTrace {
  std::vector<double> objective_history;
  // Objective after every half step (precoder update, receiver update); MSE only.
  std::vector<double> half_step_history;
  int iterations = 0;
  bool converged = false;
  RelaySolution solution;
  Receivers receivers;
};

using MseTrace = SolveTrace<ReceiverFilters>;
using RateTrace = SolveTrace<RateReceiverState>;

// H Q H^H + gamma^2 I.
CMatrix relay_covariance(const Scenario& sc);

double relay_tx_power(const CMatrix& g, const Scenario& sc);
double relay_tx_power(const RelaySolution& sol, const Scenario& sc);

// Pairs g_bar with the alpha that makes the relay transmit exactly P_r.
RelaySolution scale_to_budget(CMatrix g_bar, const Scenario& sc);

double weighted_sum_mse(const RelaySolution& sol, const ReceiverFilters& rf, const Scenario& sc,
                        const SwitchPattern& pat);
// Same with an explicit receiver-indexed weight vector.
double weighted_sum_mse(const RelaySolution& sol, const CVector& b, const CVector& c_bar,
                        const RVector& weights, const Scenario& sc, const SwitchPattern& pat);

// Indexed by sender.
RVector sinr_per_user(const CMatrix& g, const CVector& delta, const Scenario& sc,
                      const SwitchPattern& pat);
double weighted_sum_rate(const CMatrix& g, const CVector& delta, const Scenario& sc,
                         const SwitchPattern& pat);

MmseStatistics mmse_receiver_stats(const CMatrix& g, const CVector& delta, const Scenario& sc,
                                   const SwitchPattern& pat);

double rate_via_mse_decomposition(const RelaySolution& sol, const RateReceiverState& state,
                                  const Scenario& sc, const SwitchPattern& pat);

FilteredSignals filtered_signal_matrices(const RelaySolution& sol, const Scenario& sc,
                                         const SwitchPattern& pat);

// [F G H]_diag, the self-interference each receiver can cancel.
CVector self_interference(const CMatrix& g, const Scenario& sc);

// Delta used when reporting rates: self-interference in PNC mode, zero otherwise.
CVector cancellation_for(Mode mode, const CMatrix& g, const Scenario& sc);

}  // namespace mimo_switch
