#include "mimo_switch/baselines.hpp"

#include "mimo_switch/asymptotics.hpp"
#include "mimo_switch/high_snr.hpp"
#include "mimo_switch/mse_min.hpp"

namespace mimo_switch {

ReceiverFilters mmse_relay_only_filters(int users) {
  return ReceiverFilters{CVector::Zero(users), CVector::Ones(users), Mode::NonPnc};
}

RelaySolution mmse_relay_only(const Scenario& sc, const SwitchPattern& pat) {
  return update_precoder_mse(mmse_relay_only_filters(sc.users()), sc, pat);
}

ZfSolution zf_from_receivers(const Scenario& sc, const SwitchPattern& pat, Mode mode, const CVector& b,
                             const CVector& c) {
  const int k = sc.users();
  const CVector bb = mode == Mode::Pnc ? b : CVector::Zero(k);
  const RelaySolution sol = scale_to_budget(high_snr_zf_precoder(sc, pat, bb, c), sc);
  // g_bar = F^+ C^{-1} (P + B) H^+, so C_bar = C gives C_bar F g_bar H = P + B.
  ReceiverFilters rf{bb, c, mode};
  return ZfSolution{sol, rf};
}

ZfSolution zf_scheme(const Scenario& sc, const SwitchPattern& pat, Mode mode, int rounds) {
  const HighSnrChannelStats st = HighSnrChannelStats::from(sc);
  if (mode == Mode::NonPnc)
    return zf_from_receivers(sc, pat, mode, CVector::Zero(sc.users()), non_pnc_mse_c(st, sc, pat));
  const HighSnrReceivers hs = high_snr_mse_receivers(st, sc, pat, rounds);
  return zf_from_receivers(sc, pat, mode, hs.b, hs.c);
}

}  // namespace mimo_switch
