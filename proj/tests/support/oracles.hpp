#pragma once

// Reference computations written straight from the signal model
//   r = F G (H Q^{1/2} s + n_relay) + n_user,   receiver j estimates (P + B)_j Q^{1/2} s
// without going through the library's per-user expressions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mimo_switch/linalg.hpp"
#include "mimo_switch/mimo_switch.hpp"

namespace oracle {

using mimo_switch::CMatrix;
using mimo_switch::Complex;
using mimo_switch::CVector;
using mimo_switch::RVector;
using mimo_switch::Scenario;
using mimo_switch::SwitchPattern;

inline CMatrix gaussian(std::mt19937_64& rng, int rows, int cols, double var = 1.0) {
  std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
  CMatrix m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = Complex(nd(rng), nd(rng));
  return m;
}

inline CVector gaussian_vec(std::mt19937_64& rng, int n, double var = 1.0) {
  return gaussian(rng, n, 1, var).col(0);
}

inline RVector uniform_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  RVector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// Random channels with non-unit powers, budgets, noises and weights.
inline Scenario random_scenario(std::mt19937_64& rng, int antennas, int users, bool generic = true) {
  mimo_switch::ScenarioParams p;
  p.uplink = gaussian(rng, antennas, users);
  p.downlink = gaussian(rng, users, antennas);
  if (generic) {
    p.power_caps = uniform_vec(rng, users, 0.5, 2.0);
    p.relay_budget = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    p.relay_noise = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
    p.user_noise = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
    p.mse_weights = uniform_vec(rng, users, 0.5, 2.0);
    p.rate_weights = uniform_vec(rng, users, 0.5, 2.0);
  } else {
    p.power_caps = RVector::Ones(users);
  }
  return Scenario(p);
}

inline SwitchPattern random_derangement(std::mt19937_64& rng, int k) {
  std::vector<int> perm(k);
  for (;;) {
    for (int i = 0; i < k; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    bool ok = true;
    for (int i = 0; i < k; ++i) ok = ok && perm[i] != i;
    if (ok) return SwitchPattern(perm);
  }
}

inline CMatrix perm_matrix(const SwitchPattern& pat) {
  const int k = pat.size();
  CMatrix p = CMatrix::Zero(k, k);
  for (int i = 0; i < k; ++i) p(pat.receiver_of(i), i) = 1.0;
  return p;
}

inline CMatrix diag(const CVector& v) { return v.asDiagonal(); }

inline CMatrix q_matrix(const Scenario& sc) { return sc.powers().cast<Complex>().asDiagonal(); }

inline double relay_power(const CMatrix& g, const Scenario& sc) {
  const CMatrix& h = sc.uplink();
  const CMatrix cov = h * q_matrix(sc) * h.adjoint() +
                      sc.relay_noise() * CMatrix::Identity(h.rows(), h.rows());
  return (g * cov * g.adjoint()).trace().real();
}

// E || W^{1/2} ((P + B) x - C r) ||^2 with C the actual receive scaling.
inline double sum_mse(const CMatrix& g, const CVector& b, const CVector& c, const Scenario& sc,
                      const SwitchPattern& pat) {
  const CMatrix& h = sc.uplink();
  const CMatrix& f = sc.downlink();
  const CMatrix w = sc.mse_weights().cast<Complex>().asDiagonal();
  const CMatrix cm = diag(c);
  const CMatrix e = perm_matrix(pat) + diag(b) - cm * f * g * h;
  const CMatrix cfg = cm * f * g;
  return (w * e * q_matrix(sc) * e.adjoint()).trace().real() +
         sc.relay_noise() * (w * cfg * cfg.adjoint()).trace().real() +
         sc.user_noise() * (w * cm * cm.adjoint()).trace().real();
}

inline double monte_carlo_mse(const CMatrix& g, const CVector& b, const CVector& c, const Scenario& sc,
                              const SwitchPattern& pat, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int k = sc.users();
  const int n = sc.antennas();
  const CMatrix target = perm_matrix(pat) + diag(b);
  const RVector sq = sc.powers().cwiseSqrt();
  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    const CVector x = sq.cast<Complex>().cwiseProduct(gaussian_vec(rng, k));
    const CVector nr = gaussian_vec(rng, n, sc.relay_noise());
    const CVector nu = gaussian_vec(rng, k, sc.user_noise());
    const CVector r = sc.downlink() * g * (sc.uplink() * x + nr) + nu;
    const CVector err = target * x - c.cwiseProduct(r);
    acc += (sc.mse_weights().cwiseProduct(err.cwiseAbs2())).sum();
  }
  return acc / draws;
}

// SINR of each sender's stream at its receiver; delta is the part of the receiver's own
// signal that it removes before detection.
inline RVector sinr(const CMatrix& g, const CVector& delta, const Scenario& sc, const SwitchPattern& pat) {
  const int k = sc.users();
  const CMatrix a = sc.downlink() * g * sc.uplink();
  const CMatrix fg = sc.downlink() * g;
  RVector out(k);
  for (int i = 0; i < k; ++i) {
    const int j = pat.receiver_of(i);
    double other = sc.relay_noise() * fg.row(j).squaredNorm() + sc.user_noise();
    for (int l = 0; l < k; ++l) {
      if (l == i) continue;
      Complex gain = a(j, l);
      if (l == j) gain -= delta[j];
      other += sc.powers()[l] * std::norm(gain);
    }
    out[i] = sc.powers()[i] * std::norm(a(j, i)) / other;
  }
  return out;
}

inline double sum_rate_bits(const CMatrix& g, const CVector& delta, const Scenario& sc,
                            const SwitchPattern& pat) {
  const RVector s = sinr(g, delta, sc, pat);
  double v = 0.0;
  for (int i = 0; i < sc.users(); ++i) v += 0.5 * sc.rate_weights()[i] * std::log2(1.0 + s[i]);
  return v;
}

// Leading-order quantities of the exact zero-forcing relay G = F^+ C^{-1} (P + B) H^+.
struct ZfLimit {
  double sum_mse;        // weighted, interference free
  double log_rate_bits;  // sum of t/2 log2(SINR), the 1 + dropped
  double relay_power;    // signal part only
};

inline ZfLimit zf_limit(const CVector& b, const CVector& c, const Scenario& sc, const SwitchPattern& pat) {
  const CMatrix g = mimo_switch::linalg::pinv(sc.downlink()) * diag(c.cwiseInverse()) *
                    (perm_matrix(pat) + diag(b)) * mimo_switch::linalg::pinv(sc.uplink());
  const CMatrix fg = sc.downlink() * g;
  ZfLimit out{0.0, 0.0, 0.0};
  for (int j = 0; j < sc.users(); ++j) {
    const int i = pat.sender_to(j);
    const double noise = sc.relay_noise() * fg.row(j).squaredNorm() + sc.user_noise();
    out.sum_mse += sc.mse_weights()[j] * std::norm(c[j]) * noise;
    out.log_rate_bits += 0.5 * sc.rate_weights()[i] * std::log2(sc.powers()[i] / (std::norm(c[j]) * noise));
  }
  const CMatrix gh = g * sc.uplink();
  out.relay_power = (gh * q_matrix(sc) * gh.adjoint()).trace().real();
  return out;
}

// Minimizes f over R^n with central-difference gradients and Armijo backtracking.
inline std::vector<double> gradient_descent(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, int iterations, double h = 1e-6) {
  const std::size_t n = x.size();
  double fx = f(x);
  double step = 1.0;
  std::vector<double> g(n), xn(n);
  for (int it = 0; it < iterations; ++it) {
    double gn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (f(xp) - f(xm)) / (2.0 * h);
      gn += g[i] * g[i];
    }
    if (!(gn > 0.0) || !std::isfinite(gn)) break;
    bool moved = false;
    step *= 4.0;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] - step * g[i];
      const double fn = f(xn);
      if (std::isfinite(fn) && fn <= fx - 1e-4 * step * gn) {
        x = xn;
        fx = fn;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

inline std::vector<double> pack(const CVector& v) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v[i].real());
    out.push_back(v[i].imag());
  }
  return out;
}

inline CVector unpack(const std::vector<double>& x, std::size_t offset, Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(x[offset + 2 * i], x[offset + 2 * i + 1]);
  return v;
}

// The identity example: K = N = 2, H = F = I, swap, unit powers and weights, noise 1, P_r = 2.
inline Scenario identity_scenario() {
  mimo_switch::ScenarioParams p;
  p.uplink = CMatrix::Identity(2, 2);
  p.downlink = CMatrix::Identity(2, 2);
  p.power_caps = RVector::Ones(2);
  p.relay_budget = 2.0;
  return Scenario(p);
}

inline SwitchPattern swap2() { return SwitchPattern({1, 0}); }

}  // namespace oracle
