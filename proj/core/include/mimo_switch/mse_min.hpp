#pragma once

#include <optional>

#include "mimo_switch/model.hpp"

namespace mimo_switch {

enum class InitKind { Explicit, HighSnr, Identity, ZeroForcing };

struct MseConfig {
  double epsilon = 1e-8;
  int max_iter = 500;
  InitKind init = InitKind::HighSnr;
  std::optional<ReceiverFilters> initial;  // used when init == Explicit
  int high_snr_rounds = 100;
};

template <class Trace>
struct PowerControlled {
  RVector powers;
  Trace trace;
};

// Minimizer of the weighted MSE over the precoder for fixed diagonal (B, C_bar) and
// receiver-indexed weights. Shared by both iterative algorithms.
RelaySolution weighted_mmse_precoder(const RVector& weights, const CVector& b, const CVector& c_bar,
                                     const Scenario& sc, const SwitchPattern& pat);

RelaySolution update_precoder_mse(const ReceiverFilters& rf, const Scenario& sc,
                                  const SwitchPattern& pat);

ReceiverFilters update_receivers_mse(const RelaySolution& sol, const Scenario& sc,
                                     const SwitchPattern& pat, Mode mode);

ReceiverFilters initial_filters_mse(const Scenario& sc, const SwitchPattern& pat,
                                    const MseConfig& cfg, Mode mode);

MseTrace algorithm1(const Scenario& sc, const SwitchPattern& pat, const MseConfig& cfg, Mode mode);

// Alternates precoder, receivers and a vertex search over q in {0, Q_i}^K.
PowerControlled<MseTrace> optimize_user_powers_mse(const Scenario& sc, const SwitchPattern& pat,
                                                   const MseConfig& cfg, Mode mode);

}  // namespace mimo_switch
