#pragma once

#include "mimo_switch/model.hpp"

namespace mimo_switch {

struct PsiMatrix {
  CMatrix psi;  // NK x NK, Hermitian PSD
};

// Sum over senders l of q_l^2 w_{pi(l)} (h_l h_l^H)^T kron (F^H p_l p_l^T F).
PsiMatrix build_psi(const Scenario& sc, const SwitchPattern& pat);

// Dominant eigenvector of Psi reshaped to G (column-major) and scaled to the budget.
RelaySolution low_snr_precoder(const Scenario& sc, const SwitchPattern& pat);

// G = F^+ C^{-1} (P + B) H^+. Requires N >= K.
CMatrix high_snr_zf_precoder(const Scenario& sc, const SwitchPattern& pat, const CVector& b,
                             const CVector& c);

// N = K - 1: the precoder that nulls every coupling f_j^T G h_i with j outside {i, pi(i)}.
// When the null space is larger than one dimension, the direction maximizing useful signal
// power over relay power is returned.
RelaySolution null_space_precoder(const Scenario& sc, const SwitchPattern& pat);

}  // namespace mimo_switch
