#include "mimo_switch/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mimo_switch/linalg.hpp"

namespace mimo_switch {
namespace {

void check_precoder(const CMatrix& g, const Scenario& sc) {
  if (g.rows() != sc.antennas() || g.cols() != sc.antennas())
    throw ContractViolation("precoder must be N x N");
}

void check_vector(const CVector& v, const Scenario& sc, const char* name) {
  if (v.size() != sc.users())
    throw ContractViolation(std::string(name) + " must have K entries");
}

void check_pattern(const SwitchPattern& pat, const Scenario& sc) {
  if (pat.size() != sc.users()) throw ContractViolation("pattern size differs from K");
}

// Per receiver j, with i = pi^{-1}(j): the useful gain a = [FGH]_{j,i} and everything
// else that reaches z_j = y_j - delta_j x_j (interference, relay and user noise).
struct LinkBudget {
  CVector gain;
  RVector other;
};

LinkBudget link_budget(const CMatrix& g, const CVector& delta, const Scenario& sc,
                       const SwitchPattern& pat) {
  check_precoder(g, sc);
  check_vector(delta, sc, "delta");
  check_pattern(pat, sc);
  const int k = sc.users();
  const CMatrix fg = sc.downlink() * g;
  const CMatrix fgh = fg * sc.uplink();
  const RVector& q = sc.powers();
  LinkBudget out{CVector(k), RVector(k)};
  for (int j = 0; j < k; ++j) {
    const int i = pat.sender_to(j);
    double other = sc.relay_noise() * fg.row(j).squaredNorm() + sc.user_noise();
    for (int l = 0; l < k; ++l) {
      if (l == i) continue;
      const Complex v = fgh(j, l) - (l == j ? delta[j] : Complex(0.0));
      other += q[l] * std::norm(v);
    }
    out.gain[j] = fgh(j, i);
    out.other[j] = other;
  }
  return out;
}

}  // namespace

CMatrix relay_covariance(const Scenario& sc) {
  const CMatrix& h = sc.uplink();
  CMatrix r = h * sc.powers().cast<Complex>().asDiagonal() * h.adjoint();
  r.diagonal().array() += sc.relay_noise();
  return r;
}

double relay_tx_power(const CMatrix& g, const Scenario& sc) {
  check_precoder(g, sc);
  return linalg::trace_real(g * relay_covariance(sc) * g.adjoint());
}

double relay_tx_power(const RelaySolution& sol, const Scenario& sc) {
  return relay_tx_power(sol.precoder(), sc);
}

RelaySolution scale_to_budget(CMatrix g_bar, const Scenario& sc) {
  const double p = relay_tx_power(g_bar, sc);
  if (!(p > 0.0) || !std::isfinite(p))
    throw DegenerateSolution("precoder direction carries no power");
  return RelaySolution{std::move(g_bar), std::sqrt(sc.relay_budget() / p)};
}

double weighted_sum_mse(const RelaySolution& sol, const CVector& b, const CVector& c_bar,
                        const RVector& weights, const Scenario& sc, const SwitchPattern& pat) {
  check_precoder(sol.g_bar, sc);
  check_vector(b, sc, "b");
  check_vector(c_bar, sc, "c_bar");
  check_pattern(pat, sc);
  if (!(sol.alpha > 0.0)) throw ContractViolation("alpha must be positive");
  const int k = sc.users();
  const CMatrix fg = sc.downlink() * sol.g_bar;
  const CMatrix fgh = fg * sc.uplink();
  const RVector& q = sc.powers();
  const double noise = sc.user_noise() / (sol.alpha * sol.alpha);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    const int i = pat.sender_to(j);
    double row = 0.0;
    for (int l = 0; l < k; ++l) {
      Complex e = -c_bar[j] * fgh(j, l);
      if (l == i) e += 1.0;
      if (l == j) e += b[j];
      row += q[l] * std::norm(e);
    }
    row += std::norm(c_bar[j]) * (sc.relay_noise() * fg.row(j).squaredNorm() + noise);
    total += weights[j] * row;
  }
  return total;
}

double weighted_sum_mse(const RelaySolution& sol, const ReceiverFilters& rf, const Scenario& sc,
                        const SwitchPattern& pat) {
  return weighted_sum_mse(sol, rf.b, rf.c_bar, sc.mse_weights(), sc, pat);
}

RVector sinr_per_user(const CMatrix& g, const CVector& delta, const Scenario& sc,
                      const SwitchPattern& pat) {
  const LinkBudget lb = link_budget(g, delta, sc, pat);
  RVector sinr(sc.users());
  for (int j = 0; j < sc.users(); ++j) {
    const int i = pat.sender_to(j);
    sinr[i] = sc.powers()[i] * std::norm(lb.gain[j]) / lb.other[j];
  }
  return sinr;
}

double weighted_sum_rate(const CMatrix& g, const CVector& delta, const Scenario& sc,
                         const SwitchPattern& pat) {
  const RVector sinr = sinr_per_user(g, delta, sc, pat);
  double rate = 0.0;
  for (int i = 0; i < sc.users(); ++i) rate += sc.rate_weights()[i] * 0.5 * std::log2(1.0 + sinr[i]);
  return rate;
}

MmseStatistics mmse_receiver_stats(const CMatrix& g, const CVector& delta, const Scenario& sc,
                                   const SwitchPattern& pat) {
  const LinkBudget lb = link_budget(g, delta, sc, pat);
  const int k = sc.users();
  MmseStatistics st{CVector(k), RVector(k)};
  for (int j = 0; j < k; ++j) {
    const double qi = sc.powers()[pat.sender_to(j)];
    const double signal = qi * std::norm(lb.gain[j]);
    const double czz = lb.other[j] + signal;
    if (!(lb.other[j] > 0.0) || !std::isfinite(czz))
      throw ModelInconsistency("receiver covariance is not positive");
    st.omega[j] = qi * std::conj(lb.gain[j]) / czz;
    // q - |C_xz|^2 / C_zz written without cancellation.
    st.sigma_post[j] = qi * lb.other[j] / czz;
  }
  return st;
}

double rate_via_mse_decomposition(const RelaySolution& sol, const RateReceiverState& state,
                                  const Scenario& sc, const SwitchPattern& pat) {
  check_vector(state.delta_bar, sc, "delta_bar");
  check_vector(state.omega_bar, sc, "omega_bar");
  if (state.sigma_post.size() != sc.users()) throw ContractViolation("sigma must have K entries");
  const int k = sc.users();
  RVector weff = RVector::Zero(k);
  double log_terms = 0.0;
  double weight_sum = 0.0;
  for (int j = 0; j < k; ++j) {
    const int i = pat.sender_to(j);
    const double qi = sc.powers()[i];
    if (qi == 0.0) continue;  // silent stream carries no rate
    const double s = state.sigma_post[j];
    if (!(s > 0.0)) throw ContractViolation("posterior variance must be positive");
    const double t = sc.rate_weights()[i];
    weff[j] = t / s;
    log_terms += t * std::log(s / qi);
    weight_sum += t;
  }
  const CVector b = state.omega_bar.cwiseProduct(state.delta_bar);
  const double j_mse = weighted_sum_mse(sol, b, state.omega_bar, weff, sc, pat);
  return -0.5 * (j_mse + log_terms - weight_sum) / std::numbers::ln2;
}

FilteredSignals filtered_signal_matrices(const RelaySolution& sol, const Scenario& sc,
                                         const SwitchPattern& pat) {
  check_precoder(sol.g_bar, sc);
  check_pattern(pat, sc);
  if (!(sol.alpha > 0.0)) throw ContractViolation("alpha must be positive");
  const int k = sc.users();
  const CMatrix fg = sc.downlink() * sol.g_bar;
  const CMatrix fgh = fg * sc.uplink();
  const CMatrix r = relay_covariance(sc);
  FilteredSignals out{CVector(k), RVector(k), CVector(k)};
  const double noise = sc.user_noise() / (sol.alpha * sol.alpha);
  for (int j = 0; j < k; ++j) {
    const int i = pat.sender_to(j);
    out.d1[j] = fgh(j, j);
    out.d2[j] = (fg.row(j) * r * fg.row(j).adjoint()).value().real() + noise;
    out.s[j] = fgh(j, i) * sc.powers()[i];
  }
  return out;
}

CVector self_interference(const CMatrix& g, const Scenario& sc) {
  check_precoder(g, sc);
  return (sc.downlink() * g * sc.uplink()).diagonal();
}

CVector cancellation_for(Mode mode, const CMatrix& g, const Scenario& sc) {
  if (mode == Mode::Pnc) return self_interference(g, sc);
  return CVector::Zero(sc.users());
}

}  // namespace mimo_switch
