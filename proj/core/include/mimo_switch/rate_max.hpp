#pragma once

#include <optional>

#include "mimo_switch/mse_min.hpp"

namespace mimo_switch {

struct RateConfig {
  double delta_tol = 1e-6;  // bits
  int max_iter = 500;
  InitKind init = InitKind::HighSnr;
  // Explicit init: a starting precoder, or else a receiver state the first precoder is fitted to.
  std::optional<RelaySolution> initial_relay;
  std::optional<RateReceiverState> initial;
  int high_snr_rounds = 100;
};

RelaySolution update_precoder_rate(const RateReceiverState& state, const Scenario& sc,
                                   const SwitchPattern& pat);

RateReceiverState update_receivers_rate(const RelaySolution& sol, const Scenario& sc,
                                        const SwitchPattern& pat, Mode mode);

RateTrace algorithm2(const Scenario& sc, const SwitchPattern& pat, const RateConfig& cfg, Mode mode);

PowerControlled<RateTrace> optimize_user_powers_rate(const Scenario& sc, const SwitchPattern& pat,
                                                     const RateConfig& cfg, Mode mode);

}  // namespace mimo_switch
