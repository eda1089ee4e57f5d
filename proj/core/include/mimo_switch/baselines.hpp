#pragma once

#include "mimo_switch/model.hpp"

namespace mimo_switch {

// Conventional MMSE relay: one precoder update with B = 0 and C_bar = I.
RelaySolution mmse_relay_only(const Scenario& sc, const SwitchPattern& pat);

// Filters the MMSE relay is evaluated with.
ReceiverFilters mmse_relay_only_filters(int users);

struct ZfSolution {
  RelaySolution solution;
  ReceiverFilters filters;
};

// Zero-forcing relay with high-SNR receivers: closed-form c and b = 0 without PNC, the
// refined (b, c) with PNC. Requires N >= K.
ZfSolution zf_scheme(const Scenario& sc, const SwitchPattern& pat, Mode mode, int rounds = 100);

// Same, from precomputed high-SNR receivers (b, c).
ZfSolution zf_from_receivers(const Scenario& sc, const SwitchPattern& pat, Mode mode, const CVector& b,
                             const CVector& c);

}  // namespace mimo_switch
