#include "mimo_switch/high_snr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

namespace mimo_switch {
namespace {

constexpr double kPi = std::numbers::pi;

// Flattened view of the leading-order problem. Receiver j hears sender i = pi^{-1}(j) and
// its own signal is sent on to pi(j).
struct Problem {
  int k = 0;
  std::vector<int> sender;
  std::vector<int> next;
  RVector q, w, t;
  double gamma2 = 0.0, sigma2 = 0.0, budget = 0.0;
  const CMatrix* f_inv = nullptr;
  const CMatrix* h_inv = nullptr;

  double hh(int a, int b) const { return (*h_inv)(a, b).real(); }
  Complex h(int a, int b) const { return (*h_inv)(a, b); }
  double ff(int a, int b) const { return (*f_inv)(a, b).real(); }
  Complex f(int a, int b) const { return (*f_inv)(a, b); }

  // gamma^2-free relay noise factor at receiver j.
  double noise_gain(int j, Complex b) const {
    const int i = sender[j];
    return hh(i, i) + std::norm(b) * hh(j, j) + 2.0 * (b * h(j, i)).real();
  }
  // Power that does not depend on b (own-stream part) and the b-dependent part.
  double base_power(int j, double eta) const { return ff(j, j) * eta * q[sender[j]]; }
  Complex cross_coeff(int j, const CVector& c) const {
    return q[j] * f(next[j], j) / (c[j] * std::conj(c[next[j]]));
  }
  double b_power(int j, Complex b, const CVector& c) const {
    return ff(j, j) * q[j] * std::norm(b) / std::norm(c[j]) + 2.0 * (cross_coeff(j, c) * b).real();
  }
  // conj(f_{pi(j),j}) / (conj(c_j) c_{pi(j)}), the b-gradient of the cross term per unit q_j.
  Complex kappa(int j, const CVector& c) const {
    return f(j, next[j]) / (std::conj(c[j]) * c[next[j]]);
  }
};

Problem make_problem(const HighSnrChannelStats& st, const Scenario& sc, const SwitchPattern& pat) {
  const int k = sc.users();
  if (pat.size() != k) throw ContractViolation("pattern size differs from K");
  if (st.f_inv.rows() != k || st.h_inv.rows() != k)
    throw ContractViolation("channel statistics do not match K");
  Problem p;
  p.k = k;
  p.sender.resize(k);
  p.next.resize(k);
  for (int j = 0; j < k; ++j) {
    p.sender[j] = pat.sender_to(j);
    p.next[j] = pat.receiver_of(j);
  }
  p.q = sc.powers();
  p.w = sc.mse_weights();
  p.t = sc.rate_weights();
  p.gamma2 = sc.relay_noise();
  p.sigma2 = sc.user_noise();
  p.budget = sc.relay_budget();
  p.f_inv = &st.f_inv;
  p.h_inv = &st.h_inv;
  return p;
}

void require_active(const Problem& p) {
  for (int i = 0; i < p.k; ++i)
    if (!(p.q[i] > 0.0)) throw ContractViolation("high-SNR receivers need every user active");
}

double eta_of(Complex c) { return 1.0 / std::norm(c); }

double mse_objective(const Problem& p, const CVector& b, const CVector& c) {
  double v = 0.0;
  for (int j = 0; j < p.k; ++j)
    v += p.w[j] * (p.gamma2 * p.noise_gain(j, b[j]) + p.sigma2 * std::norm(c[j]));
  return v;
}

// Natural-log rate; callers convert to bits.
double rate_objective(const Problem& p, const CVector& b, const CVector& c) {
  double v = 0.0;
  for (int j = 0; j < p.k; ++j) {
    const int i = p.sender[j];
    const double eta = eta_of(c[j]);
    v += 0.5 * p.t[i] * std::log(p.q[i] * eta / (p.gamma2 * eta * p.noise_gain(j, b[j]) + p.sigma2));
  }
  return v;
}

double relay_power(const Problem& p, const CVector& b, const CVector& c) {
  double v = 0.0;
  for (int j = 0; j < p.k; ++j) v += p.base_power(j, eta_of(c[j])) + p.b_power(j, b[j], c);
  return v;
}

// Finds the smallest lambda >= 0 whose b-solution fits the budget, assuming the relay
// power is nonincreasing in lambda.
template <class Solve>
BStep bisect_lambda(const Problem& p, const CVector& c, Solve solve) {
  auto power_at = [&](const CVector& b) { return relay_power(p, b, c); };
  // The previous round leaves the power on the budget, so allow for rounding at lambda = 0.
  const double limit = p.budget;
  BStep step{solve(0.0), 0.0};
  if (power_at(step.b) <= limit * (1.0 + 1e-12)) return step;

  double hi = 1.0;
  CVector b_hi = solve(hi);
  while (power_at(b_hi) > limit) {
    if (hi > 1e200) {
      // b has reached the power minimizer; accept it if the excess is only rounding.
      if (power_at(b_hi) <= limit * (1.0 + 1e-9)) return BStep{b_hi, hi};
      throw InfeasibleError("relay budget is below the minimum power of any b");
    }
    hi *= 8.0;
    b_hi = solve(hi);
  }
  double lo = hi / 8.0;
  for (int g = 0; power_at(solve(lo)) <= limit; ++g) {
    if (g > 60) return step;
    hi = lo;
    lo /= 8.0;
  }
  b_hi = solve(hi);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    const CVector b_mid = solve(mid);
    if (power_at(b_mid) > limit) {
      lo = mid;
    } else {
      hi = mid;
      b_hi = b_mid;
    }
  }
  return BStep{b_hi, hi};
}

CVector mse_b(const Problem& p, const CVector& c, double lambda) {
  CVector b(p.k);
  for (int j = 0; j < p.k; ++j) {
    const int i = p.sender[j];
    const double gw = p.gamma2 * p.w[j];
    const Complex num = gw * p.h(i, j) + lambda * p.q[j] * p.kappa(j, c);
    const double den = gw * p.hh(j, j) + lambda * p.q[j] * p.ff(j, j) * eta_of(c[j]);
    b[j] = -num / den;
  }
  return b;
}

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 with c3 != 0, each refined by Newton steps.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
  const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  const double qq = (a * a - 3.0 * b) / 9.0;
  const double rr = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  std::vector<double> roots;
  if (rr * rr < qq * qq * qq) {
    const double theta = std::acos(std::clamp(rr / std::sqrt(qq * qq * qq), -1.0, 1.0));
    const double m = -2.0 * std::sqrt(qq);
    roots = {m * std::cos(theta / 3.0) - a / 3.0, m * std::cos((theta + 2.0 * kPi) / 3.0) - a / 3.0,
             m * std::cos((theta - 2.0 * kPi) / 3.0) - a / 3.0};
  } else {
    const double big = -std::copysign(std::cbrt(std::abs(rr) + std::sqrt(rr * rr - qq * qq * qq)), rr);
    const double small = big != 0.0 ? qq / big : 0.0;
    roots = {big + small - a / 3.0};
  }
  for (double& x : roots) {
    for (int it = 0; it < 4; ++it) {
      const double f = ((x + a) * x + b) * x + c;
      const double d = (3.0 * x + 2.0 * a) * x + b;
      if (d == 0.0) break;
      const double nx = x - f / d;
      if (!std::isfinite(nx)) break;
      x = nx;
    }
  }
  return roots;
}

// Per-receiver rate Lagrangian in b: -t/2 log(gamma^2 eta n(b) + sigma^2) - lambda P_j(b).
double rate_lagrangian(const Problem& p, int j, Complex b, const CVector& c, double lambda) {
  const int i = p.sender[j];
  const double eta = eta_of(c[j]);
  return -0.5 * p.t[i] * std::log(p.gamma2 * eta * p.noise_gain(j, b) + p.sigma2) -
         lambda * p.b_power(j, b, c);
}

// Stationary points satisfy A (h_jj b + h_ij) + beta (f_jj eta b + kappa) = 0 with
// A = t gamma^2 eta / 2 and beta = lambda q_j (gamma^2 eta n(b) + sigma^2). Eliminating b
// leaves a cubic in beta.
Complex rate_b_single(const Problem& p, int j, const CVector& c, double lambda) {
  const int i = p.sender[j];
  if (lambda == 0.0) return -p.h(i, j) / p.hh(j, j);
  const double eta = eta_of(c[j]);
  const double a_coef = 0.5 * p.t[i] * p.gamma2 * eta;
  const double lq = lambda * p.q[j];
  const Complex kap = p.kappa(j, c);
  const double d0 = a_coef * p.hh(j, j), d1 = p.ff(j, j) * eta;
  const Complex n0 = -a_coef * p.h(i, j), n1 = -kap;
  const Complex hji = p.h(j, i);
  const double ge = p.gamma2 * eta;
  // den^2, |num|^2 and Re(num h_ji) den as polynomials in beta (ascending powers).
  const std::array<double, 3> den2{d0 * d0, 2.0 * d0 * d1, d1 * d1};
  const std::array<double, 3> num2{std::norm(n0), 2.0 * (n0 * std::conj(n1)).real(), std::norm(n1)};
  const double r0 = (n0 * hji).real(), r1 = (n1 * hji).real();
  const std::array<double, 3> cross{r0 * d0, r0 * d1 + r1 * d0, r1 * d1};
  std::array<double, 4> poly{};
  for (int e = 0; e < 3; ++e) {
    poly[e + 1] += den2[e] / lq;
    poly[e] -= (p.sigma2 + ge * p.hh(i, i)) * den2[e] + ge * p.hh(j, j) * num2[e] + 2.0 * ge * cross[e];
  }
  for (double v : poly)
    if (!std::isfinite(v)) return rate_b_single(p, j, c, 0.0);
  std::vector<double> roots = real_cubic_roots(poly[3], poly[2], poly[1], poly[0]);

  // The closed form can lose every admissible root to cancellation. phi below is <= 0 at
  // beta = lambda q sigma^2 and grows without bound, so bisection always finds one more.
  auto phi = [&](double beta) {
    const Complex b = (n0 + n1 * beta) / (d0 + d1 * beta);
    return beta - lq * (ge * p.noise_gain(j, b) + p.sigma2);
  };
  double lo = lq * p.sigma2, hi = std::max(2.0 * lo, 1e-300);
  for (int g = 0; g < 2000 && phi(hi) <= 0.0; ++g) hi *= 2.0;
  if (phi(hi) > 0.0) {
    for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) > 0.0 ? hi : lo) = mid;
    }
    roots.push_back(hi);
  }

  Complex best = 0.0;
  double best_value = -std::numeric_limits<double>::infinity();
  bool found = false;
  const double floor = lq * p.sigma2 * (1.0 - 1e-9);
  for (double beta : roots) {
    if (!std::isfinite(beta) || beta <= floor) continue;
    const double den = d0 + d1 * beta;
    if (!(den > 0.0)) continue;
    const Complex b = (n0 + n1 * beta) / den;
    const double value = rate_lagrangian(p, j, b, c, lambda);
    if (value > best_value) {
      best_value = value;
      best = b;
      found = true;
    }
  }
  if (!found)
    throw NumericError("no admissible cubic root for receiver " + std::to_string(j + 1));
  return best;
}

CVector rate_b(const Problem& p, const CVector& c, double lambda) {
  CVector b(p.k);
  for (int j = 0; j < p.k; ++j) b[j] = rate_b_single(p, j, c, lambda);
  return b;
}

double wrap_angle(double x) {
  x = std::fmod(x + kPi, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  return x - kPi;
}

// Maximizes sum A_j cos(eps_j) subject to sum eps_j = target (mod 2 pi). At an optimum
// A_j sin(eps_j) is a common nu, with at most the smallest-A entry off the principal branch.
std::vector<double> best_cycle_offsets(const std::vector<double>& amp, double target,
                                       const std::vector<double>& current) {
  const int len = static_cast<int>(amp.size());
  auto value = [&](const std::vector<double>& eps) {
    double v = 0.0;
    for (int j = 0; j < len; ++j) v += amp[j] * std::cos(eps[j]);
    return v;
  };
  const double amax = *std::max_element(amp.begin(), amp.end());
  if (amax == 0.0) return current;
  const int weakest = static_cast<int>(std::min_element(amp.begin(), amp.end()) - amp.begin());
  const double amin = amp[weakest];
  if (amin <= 1e-14 * amax) {
    std::vector<double> eps(len, 0.0);
    eps[weakest] = wrap_angle(target);
    return value(eps) >= value(current) ? eps : current;
  }

  std::vector<double> best = current;
  double best_value = value(current);
  auto offer = [&](const std::vector<double>& eps) {
    const double v = value(eps);
    if (v > best_value) {
      best_value = v;
      best = eps;
    }
  };
  auto offsets = [&](double nu, bool flip) {
    std::vector<double> eps(len);
    for (int j = 0; j < len; ++j) eps[j] = std::asin(std::clamp(nu / amp[j], -1.0, 1.0));
    if (flip) eps[weakest] = kPi - eps[weakest];
    return eps;
  };
  auto total = [&](double nu, bool flip) {
    double s = 0.0;
    for (double e : offsets(nu, flip)) s += e;
    return s;
  };
  auto solve_on = [&](double lo, double hi, double goal, bool flip) {
    double flo = total(lo, flip) - goal;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = total(mid, flip) - goal;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    offer(offsets(0.5 * (lo + hi), flip));
  };

  const double base = wrap_angle(target);
  const int max_wraps = len / 4 + 2;
  constexpr int kGrid = 256;
  for (bool flip : {false, true}) {
    std::vector<double> grid(kGrid + 1), vals(kGrid + 1);
    for (int g = 0; g <= kGrid; ++g) {
      grid[g] = -amin + 2.0 * amin * g / kGrid;
      vals[g] = total(grid[g], flip);
    }
    for (int m = -max_wraps; m <= max_wraps; ++m) {
      const double goal = base + 2.0 * kPi * m;
      for (int g = 0; g < kGrid; ++g) {
        const double a = vals[g] - goal, b = vals[g + 1] - goal;
        if (a == 0.0) offer(offsets(grid[g], flip));
        if ((a < 0.0) != (b < 0.0)) solve_on(grid[g], grid[g + 1], goal, flip);
      }
      if (vals[kGrid] - goal == 0.0) offer(offsets(grid[kGrid], flip));
    }
  }
  return best;
}

CVector align_phases(const Problem& p, const CVector& b, const CVector& c,
                     const std::vector<std::vector<int>>& cycles) {
  CVector out = c;
  for (const auto& cycle : cycles) {
    const int len = static_cast<int>(cycle.size());
    if (len < 2) continue;
    std::vector<double> amp(len), phi(len), eps(len);
    double phi_sum = 0.0;
    for (int m = 0; m < len; ++m) {
      const int j = cycle[m];
      const Complex z = p.q[j] * p.f(p.next[j], j) * b[j];
      amp[m] = 2.0 * std::abs(z) / (std::abs(c[j]) * std::abs(c[p.next[j]]));
      phi[m] = std::arg(z);
      const double delta = std::arg(c[p.next[j]]) - std::arg(c[j]);
      eps[m] = wrap_angle(phi[m] + delta - kPi);
      phi_sum += phi[m];
    }
    const std::vector<double> best = best_cycle_offsets(amp, phi_sum - len * kPi, eps);
    double theta = std::arg(c[cycle[0]]);
    for (int m = 0; m + 1 < len; ++m) {
      const double delta = best[m] + kPi - phi[m];
      theta += delta;
      const int nj = cycle[m + 1];
      out[nj] = std::polar(std::abs(c[nj]), theta);
    }
  }
  return relay_power(p, b, out) <= relay_power(p, b, c) ? out : c;
}

// Quasi-Newton descent with Armijo backtracking. Steps are capped at 2 in the sup norm.
template <class Eval>
RVector bfgs_minimize(RVector x, Eval eval, int max_iter) {
  const Eigen::Index n = x.size();
  RVector g(n), gn(n);
  double fx = eval(x, g);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  for (int it = 0; it < max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, std::abs(fx))) break;
    RVector d = -hinv * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      d = -g;
      slope = g.dot(d);
    }
    const double dmax = d.lpNorm<Eigen::Infinity>();
    if (dmax > 2.0) {
      d *= 2.0 / dmax;
      slope = g.dot(d);
    }
    double step = 1.0;
    RVector xn = x;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * d;
      fn = eval(xn, gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const RVector s = xn - x;
    const RVector y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
      hinv = (ident - rho * s * y.transpose()) * hinv * (ident - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    const double prev = fx;
    x = xn;
    fx = fn;
    g = gn;
    if (std::abs(prev - fx) <= 1e-16 * std::max(1.0, std::abs(fx))) break;
  }
  return x;
}

// Minimizes f(eta) over the shell where the relay power equals P_r. The power is
// homogeneous of degree one in eta, so eta = e^x P_r / P(e^x) parametrizes the shell.
class ShellSolver {
 public:
  using Grad = std::function<double(const RVector& eta, RVector& grad)>;

  ShellSolver(const Problem& p, const CVector& b, const CVector& c) : p_(p) {
    const int k = p.k;
    lin_.resize(k);
    cross_.resize(k);
    for (int j = 0; j < k; ++j) {
      lin_[j] = p.ff(j, j) * (p.q[p.sender[j]] + p.q[j] * std::norm(b[j]));
      const Complex z = p.q[j] * p.f(p.next[j], j) * b[j];
      const double psi = std::arg(z) + std::arg(c[p.next[j]]) - std::arg(c[j]);
      cross_[j] = 2.0 * std::abs(z) * std::cos(psi);
    }
  }

  double power(const RVector& eta) const {
    double v = 0.0;
    for (int j = 0; j < p_.k; ++j)
      v += lin_[j] * eta[j] + cross_[j] * std::sqrt(eta[j] * eta[p_.next[j]]);
    return v;
  }

  RVector power_grad(const RVector& eta) const {
    RVector g = lin_;
    for (int j = 0; j < p_.k; ++j) {
      const int n = p_.next[j];
      const double s = std::sqrt(eta[j] * eta[n]);
      if (s == 0.0) continue;
      g[j] += 0.5 * cross_[j] * s / eta[j];
      g[n] += 0.5 * cross_[j] * s / eta[n];
    }
    return g;
  }

  RVector shell(const RVector& x) const {
    const RVector e = x.array().exp();
    return e * (p_.budget / power(e));
  }

  // Returns the optimized eta; never worse than the (rescaled) starting point.
  RVector solve(const RVector& eta0, const Grad& f) const {
    RVector eg(p_.k);
    auto eval = [&](const RVector& xx, RVector& gx) {
      const RVector eta = shell(xx);
      const double v = f(eta, eg);
      const RVector pg = power_grad(eta);
      const double s = eg.dot(eta);
      gx = eg.cwiseProduct(eta) - s * eta.cwiseProduct(pg) / power(eta);
      return v;
    };
    return shell(bfgs_minimize(eta0.array().log(), eval, 200));
  }

 private:
  const Problem& p_;
  RVector lin_;
  RVector cross_;
};

CVector with_magnitudes(const CVector& c, const RVector& eta) {
  CVector out(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) out[j] = std::polar(1.0 / std::sqrt(eta[j]), std::arg(c[j]));
  return out;
}

RVector etas(const CVector& c) {
  RVector e(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) e[j] = eta_of(c[j]);
  return e;
}

RVector noise_gains(const Problem& p, const CVector& b) {
  RVector n(p.k);
  for (int j = 0; j < p.k; ++j) n[j] = p.noise_gain(j, b[j]);
  return n;
}

enum class Goal { Mse, Rate };

// Joint descent over (b, arg c, log |c|^-2) on the power shell. Alternating b and c steps
// can stall where their budget multipliers disagree; this removes that stall.
void joint_polish(const Problem& p, Goal goal, CVector& b, CVector& c) {
  const int k = p.k;
  auto unpack = [&](const RVector& u, CVector& bb, RVector& theta, RVector& eta) -> bool {
    for (int j = 0; j < k; ++j) {
      bb[j] = Complex(u[j], u[k + j]);
      theta[j] = u[2 * k + j];
      eta[j] = std::exp(u[3 * k + j]);
    }
    double pw = 0.0;
    for (int j = 0; j < k; ++j) {
      const int n = p.next[j];
      const Complex z = p.q[j] * p.f(n, j) * std::polar(std::sqrt(eta[j] * eta[n]), theta[n] - theta[j]);
      pw += p.ff(j, j) * eta[j] * (p.q[p.sender[j]] + p.q[j] * std::norm(bb[j])) + 2.0 * (z * bb[j]).real();
    }
    if (!(pw > 0.0) || !std::isfinite(pw)) return false;
    eta *= p.budget / pw;
    return true;
  };
  auto eval = [&](const RVector& u, RVector& g) {
    CVector bb(k);
    RVector theta(k), eta(k);
    g.setZero(4 * k);
    if (!unpack(u, bb, theta, eta)) return std::numeric_limits<double>::infinity();
    double v = 0.0;
    RVector g_eta(k);
    CVector g_b(k);
    for (int j = 0; j < k; ++j) {
      const int i = p.sender[j];
      const double nj = p.noise_gain(j, bb[j]);
      const Complex dn = 2.0 * p.hh(j, j) * bb[j] + 2.0 * std::conj(p.h(j, i));
      if (goal == Goal::Mse) {
        v += p.w[j] * (p.gamma2 * nj + p.sigma2 / eta[j]);
        g_b[j] = p.w[j] * p.gamma2 * dn;
        g_eta[j] = -p.w[j] * p.sigma2 / (eta[j] * eta[j]);
      } else {
        const double den = p.gamma2 * eta[j] * nj + p.sigma2;
        v -= 0.5 * p.t[i] * std::log(p.q[i] * eta[j] / den);
        g_b[j] = 0.5 * p.t[i] * p.gamma2 * eta[j] / den * dn;
        g_eta[j] = -0.5 * p.t[i] * p.sigma2 / (eta[j] * den);
      }
    }
    // Power derivatives at the shell point.
    CVector p_b(k);
    RVector p_theta = RVector::Zero(k), p_eta(k);
    for (int j = 0; j < k; ++j) p_eta[j] = p.ff(j, j) * (p.q[p.sender[j]] + p.q[j] * std::norm(bb[j]));
    for (int j = 0; j < k; ++j) {
      const int n = p.next[j];
      const Complex z = p.q[j] * p.f(n, j) * std::polar(std::sqrt(eta[j] * eta[n]), theta[n] - theta[j]);
      const Complex zb = z * bb[j];
      p_b[j] = 2.0 * p.ff(j, j) * eta[j] * p.q[j] * bb[j] + 2.0 * std::conj(z);
      p_theta[j] += 2.0 * zb.imag();
      p_theta[n] -= 2.0 * zb.imag();
      p_eta[j] += zb.real() / eta[j];
      p_eta[n] += zb.real() / eta[n];
    }
    const double s = g_eta.dot(eta) / p.budget;
    for (int j = 0; j < k; ++j) {
      const Complex gb = g_b[j] - s * p_b[j];
      g[j] = gb.real();
      g[k + j] = gb.imag();
      g[2 * k + j] = -s * p_theta[j];
      g[3 * k + j] = eta[j] * (g_eta[j] - s * p_eta[j]);
    }
    return v;
  };
  RVector u(4 * k);
  for (int j = 0; j < k; ++j) {
    u[j] = b[j].real();
    u[k + j] = b[j].imag();
    u[2 * k + j] = std::arg(c[j]);
    u[3 * k + j] = std::log(eta_of(c[j]));
  }
  RVector g0(4 * k);
  const double before = eval(u, g0);
  const RVector best = bfgs_minimize(u, eval, 2000);
  RVector g1(4 * k);
  if (!(eval(best, g1) < before)) return;
  CVector bb(k);
  RVector theta(k), eta(k);
  unpack(best, bb, theta, eta);
  b = bb;
  for (int j = 0; j < k; ++j) c[j] = std::polar(1.0 / std::sqrt(eta[j]), theta[j]);
}

HighSnrReceivers refine(const Problem& p, const SwitchPattern& pat, CVector c, int rounds, Goal goal) {
  const auto cycles = pat.cycles();
  CVector b = CVector::Zero(p.k);
  // Both objectives are minimized internally; the rate is negated.
  auto objective = [&](const CVector& bb, const CVector& cc) {
    return goal == Goal::Mse ? mse_objective(p, bb, cc) : -rate_objective(p, bb, cc);
  };
  HighSnrReceivers out;
  double current = objective(b, c);
  auto report = [&](double v) {
    out.objective_history.push_back(goal == Goal::Mse ? v : -v / std::numbers::ln2);
  };
  report(current);
  for (int round = 0; round < rounds; ++round) {
    const CVector nb = goal == Goal::Mse ? bisect_lambda(p, c, [&](double l) { return mse_b(p, c, l); }).b
                                         : bisect_lambda(p, c, [&](double l) { return rate_b(p, c, l); }).b;
    if (objective(nb, c) <= current) b = nb;

    c = align_phases(p, b, c, cycles);

    const RVector gains = noise_gains(p, b);
    ShellSolver shell(p, b, c);
    ShellSolver::Grad f;
    if (goal == Goal::Mse) {
      f = [&](const RVector& eta, RVector& grad) {
        double v = 0.0;
        for (int j = 0; j < p.k; ++j) {
          v += p.w[j] * (p.gamma2 * gains[j] + p.sigma2 / eta[j]);
          grad[j] = -p.w[j] * p.sigma2 / (eta[j] * eta[j]);
        }
        return v;
      };
    } else {
      f = [&](const RVector& eta, RVector& grad) {
        double v = 0.0;
        for (int j = 0; j < p.k; ++j) {
          const int i = p.sender[j];
          const double den = p.gamma2 * eta[j] * gains[j] + p.sigma2;
          v -= 0.5 * p.t[i] * std::log(p.q[i] * eta[j] / den);
          grad[j] = -0.5 * p.t[i] * p.sigma2 / (eta[j] * den);
        }
        return v;
      };
    }
    const CVector nc = with_magnitudes(c, shell.solve(etas(c), f));
    const double candidate = objective(b, nc);
    if (candidate <= objective(b, c) && relay_power(p, b, nc) <= p.budget * (1.0 + 1e-9)) c = nc;

    const double next = objective(b, c);
    const double change = current - next;
    current = std::min(current, next);
    report(current);
    if (change <= 1e-12 * std::max(1.0, std::abs(current))) break;
  }
  joint_polish(p, goal, b, c);
  current = std::min(current, objective(b, c));
  report(current);
  out.b = b;
  out.c = c;
  return out;
}

}  // namespace

HighSnrChannelStats HighSnrChannelStats::from(const Scenario& sc) {
  const int k = sc.users();
  if (sc.antennas() < k) throw ContractViolation("high-SNR statistics need N >= K");
  const CMatrix& h = sc.uplink();
  const CMatrix& f = sc.downlink();
  const CMatrix ident = CMatrix::Identity(k, k);
  CMatrix hi = (h.adjoint() * h).ldlt().solve(ident);
  CMatrix fi = (f * f.adjoint()).ldlt().solve(ident);
  if (!hi.allFinite() || !fi.allFinite()) throw RankError("channel Gram matrices are singular");
  hi = 0.5 * (hi + hi.adjoint()).eval();
  fi = 0.5 * (fi + fi.adjoint()).eval();
  return HighSnrChannelStats{fi, hi};
}

double high_snr_mse_objective(const HighSnrChannelStats& st, const Scenario& sc,
                              const SwitchPattern& pat, const CVector& b, const CVector& c) {
  return mse_objective(make_problem(st, sc, pat), b, c);
}

double high_snr_rate_objective(const HighSnrChannelStats& st, const Scenario& sc,
                               const SwitchPattern& pat, const CVector& b, const CVector& c) {
  return rate_objective(make_problem(st, sc, pat), b, c) / std::numbers::ln2;
}

double high_snr_relay_power(const HighSnrChannelStats& st, const Scenario& sc,
                            const SwitchPattern& pat, const CVector& b, const CVector& c) {
  return relay_power(make_problem(st, sc, pat), b, c);
}

BStep high_snr_mse_b_step(const HighSnrChannelStats& st, const Scenario& sc,
                          const SwitchPattern& pat, const CVector& c) {
  const Problem p = make_problem(st, sc, pat);
  return bisect_lambda(p, c, [&](double l) { return mse_b(p, c, l); });
}

BStep high_snr_rate_b_step(const HighSnrChannelStats& st, const Scenario& sc,
                           const SwitchPattern& pat, const CVector& c) {
  const Problem p = make_problem(st, sc, pat);
  require_active(p);
  return bisect_lambda(p, c, [&](double l) { return rate_b(p, c, l); });
}

CVector align_receiver_phases(const HighSnrChannelStats& st, const Scenario& sc,
                              const SwitchPattern& pat, const CVector& b, const CVector& c) {
  return align_phases(make_problem(st, sc, pat), b, c, pat.cycles());
}

double rate_b_stationarity_residual(const HighSnrChannelStats& st, const Scenario& sc,
                                    const SwitchPattern& pat, const CVector& b, const CVector& c,
                                    double lambda, int j) {
  const Problem p = make_problem(st, sc, pat);
  const int i = p.sender[j];
  const double eta = eta_of(c[j]);
  const double a_coef = 0.5 * p.t[i] * p.gamma2 * eta;
  const double beta = lambda * p.q[j] * (p.gamma2 * eta * p.noise_gain(j, b[j]) + p.sigma2);
  const Complex kap = p.kappa(j, c);
  const Complex left = a_coef * (p.hh(j, j) * b[j] + p.h(i, j));
  const Complex right = beta * (p.ff(j, j) * eta * b[j] + kap);
  const double scale = std::abs(a_coef) * (std::abs(p.hh(j, j) * b[j]) + std::abs(p.h(i, j))) +
                       beta * (std::abs(p.ff(j, j) * eta * b[j]) + std::abs(kap));
  return scale > 0.0 ? std::abs(left + right) / scale : 0.0;
}

CVector non_pnc_mse_c(const HighSnrChannelStats& st, const Scenario& sc, const SwitchPattern& pat) {
  const Problem p = make_problem(st, sc, pat);
  RVector a(p.k);
  for (int j = 0; j < p.k; ++j) a[j] = p.ff(j, j) * p.q[p.sender[j]];
  double sum = 0.0;
  for (int l = 0; l < p.k; ++l) sum += std::sqrt(p.w[l] * a[l]);
  CVector c(p.k);
  for (int j = 0; j < p.k; ++j) {
    const double mag2 = std::sqrt(a[j]) * sum / (p.budget * std::sqrt(p.w[j]));
    if (!(mag2 > 0.0)) throw ContractViolation("high-SNR receivers need every user active");
    c[j] = std::sqrt(mag2);
  }
  return c;
}

CVector non_pnc_rate_c(const HighSnrChannelStats& st, const Scenario& sc, const SwitchPattern& pat) {
  const Problem p = make_problem(st, sc, pat);
  require_active(p);
  RVector a(p.k), hii(p.k), ti(p.k);
  for (int j = 0; j < p.k; ++j) {
    const int i = p.sender[j];
    a[j] = p.ff(j, j) * p.q[i];
    hii[j] = p.hh(i, i);
    ti[j] = p.t[i];
  }
  // eta_j(lambda) solves gamma^2 h_ii eta^2 + sigma^2 eta = t sigma^2 / (2 lambda a_j).
  auto eta_at = [&](double lambda) {
    RVector e(p.k);
    for (int j = 0; j < p.k; ++j) {
      const double x = 2.0 * p.gamma2 * hii[j] * ti[j] / (lambda * p.sigma2 * a[j]);
      e[j] = p.sigma2 / (2.0 * p.gamma2 * hii[j]) * x / (std::sqrt(1.0 + x) + 1.0);
    }
    return e;
  };
  auto excess = [&](double lambda) { return a.dot(eta_at(lambda)) - p.budget; };
  double lo = 1.0, hi = 1.0;
  for (int g = 0; excess(lo) < 0.0; ++g) {
    lo /= 16.0;
    if (g > 500) throw InfeasibleError("cannot bracket the power multiplier");
  }
  for (int g = 0; excess(hi) > 0.0; ++g) {
    hi *= 16.0;
    if (g > 500) throw InfeasibleError("cannot bracket the power multiplier");
  }
  for (int it = 0; it < 300 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (excess(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  const RVector e = eta_at(std::sqrt(lo * hi));
  CVector c(p.k);
  for (int j = 0; j < p.k; ++j) c[j] = 1.0 / std::sqrt(e[j]);
  return c;
}

HighSnrReceivers high_snr_mse_receivers(const HighSnrChannelStats& st, const Scenario& sc,
                                        const SwitchPattern& pat, int rounds) {
  if (!pat.is_derangement()) throw ContractViolation("PNC receivers require a derangement");
  const Problem p = make_problem(st, sc, pat);
  require_active(p);
  return refine(p, pat, non_pnc_mse_c(st, sc, pat), rounds, Goal::Mse);
}

HighSnrReceivers high_snr_rate_receivers(const HighSnrChannelStats& st, const Scenario& sc,
                                         const SwitchPattern& pat, int rounds) {
  if (!pat.is_derangement()) throw ContractViolation("PNC receivers require a derangement");
  const Problem p = make_problem(st, sc, pat);
  require_active(p);
  return refine(p, pat, non_pnc_rate_c(st, sc, pat), rounds, Goal::Rate);
}

}  // namespace mimo_switch
