#pragma once

#include "mimo_switch/types.hpp"

namespace mimo_switch {

struct ScenarioParams {
  CMatrix uplink;    // H, N x K
  CMatrix downlink;  // F, K x N
  RVector powers;    // q; defaults to power_caps when empty
  RVector power_caps;
  double relay_budget = 1.0;
  double relay_noise = 1.0;  // gamma^2
  double user_noise = 1.0;   // sigma^2
  RVector mse_weights;       // w, indexed by receiver; defaults to ones
  RVector rate_weights;      // t, indexed by sender; defaults to ones
};

// Validated, immutable description of one channel realization and its budgets.
class Scenario {
 public:
  explicit Scenario(ScenarioParams params);

  // Q_i = P_r = 1 and gamma^2 = sigma^2 = noise_variance, unit weights.
  static Scenario unit_power(CMatrix uplink, CMatrix downlink, double noise_variance);

  int users() const { return static_cast<int>(p_.uplink.cols()); }
  int antennas() const { return static_cast<int>(p_.uplink.rows()); }

  const CMatrix& uplink() const { return p_.uplink; }
  const CMatrix& downlink() const { return p_.downlink; }
  const RVector& powers() const { return p_.powers; }
  const RVector& power_caps() const { return p_.power_caps; }
  double relay_budget() const { return p_.relay_budget; }
  double relay_noise() const { return p_.relay_noise; }
  double user_noise() const { return p_.user_noise; }
  const RVector& mse_weights() const { return p_.mse_weights; }
  const RVector& rate_weights() const { return p_.rate_weights; }
  const ScenarioParams& params() const { return p_; }

  Scenario with_powers(const RVector& powers) const;
  Scenario with_noise(double relay_noise, double user_noise) const;
  Scenario with_weights(const RVector& mse_weights, const RVector& rate_weights) const;

 private:
  ScenarioParams p_;
};

}  // namespace mimo_switch
