#pragma once

#include <vector>

#include "mimo_switch/model.hpp"

namespace mimo_switch {

// (F F^H)^{-1} and (H^H H)^{-1}; requires N >= K.
struct HighSnrChannelStats {
  CMatrix f_inv;
  CMatrix h_inv;

  static HighSnrChannelStats from(const Scenario& sc);
};

struct HighSnrReceivers {
  CVector b;
  CVector c;
  std::vector<double> objective_history;
};

// Leading-order objectives and relay power of the zero-forcing precoder built from (b, c).
// Indices follow receivers; i = pi^{-1}(j) is the sender heard at receiver j.
double high_snr_mse_objective(const HighSnrChannelStats& st, const Scenario& sc,
                              const SwitchPattern& pat, const CVector& b, const CVector& c);
double high_snr_rate_objective(const HighSnrChannelStats& st, const Scenario& sc,
                               const SwitchPattern& pat, const CVector& b, const CVector& c);
double high_snr_relay_power(const HighSnrChannelStats& st, const Scenario& sc,
                            const SwitchPattern& pat, const CVector& b, const CVector& c);

HighSnrReceivers high_snr_mse_receivers(const HighSnrChannelStats& st, const Scenario& sc,
                                        const SwitchPattern& pat, int rounds = 100);
HighSnrReceivers high_snr_rate_receivers(const HighSnrChannelStats& st, const Scenario& sc,
                                         const SwitchPattern& pat, int rounds = 100);

// One b update for fixed c: per-receiver minimizers of the Lagrangian, with the multiplier
// lambda set by bisection so the relay power meets P_r (lambda = 0 when it is slack).
struct BStep {
  CVector b;
  double lambda = 0.0;
};
BStep high_snr_mse_b_step(const HighSnrChannelStats& st, const Scenario& sc,
                          const SwitchPattern& pat, const CVector& c);
BStep high_snr_rate_b_step(const HighSnrChannelStats& st, const Scenario& sc,
                           const SwitchPattern& pat, const CVector& c);

// Closed forms with b = 0.
CVector non_pnc_mse_c(const HighSnrChannelStats& st, const Scenario& sc, const SwitchPattern& pat);
CVector non_pnc_rate_c(const HighSnrChannelStats& st, const Scenario& sc, const SwitchPattern& pat);

// Phases of c that minimize the relay power for fixed b and |c|.
CVector align_receiver_phases(const HighSnrChannelStats& st, const Scenario& sc,
                              const SwitchPattern& pat, const CVector& b, const CVector& c);

// Residual of the per-receiver stationarity condition satisfied by the rate b-step,
// given the multiplier lambda. Zero at an interior stationary point.
double rate_b_stationarity_residual(const HighSnrChannelStats& st, const Scenario& sc,
                                    const SwitchPattern& pat, const CVector& b, const CVector& c,
                                    double lambda, int receiver);

}  // namespace mimo_switch
