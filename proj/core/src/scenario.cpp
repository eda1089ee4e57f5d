#include "mimo_switch/scenario.hpp"

#include <cmath>
#include <string>

#include "mimo_switch/linalg.hpp"

namespace mimo_switch {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation("scenario: " + what);
}

bool all_finite(const CMatrix& m) { return m.allFinite(); }

}  // namespace

Scenario::Scenario(ScenarioParams params) : p_(std::move(params)) {
  const auto n = p_.uplink.rows();
  const auto k = p_.uplink.cols();
  require(n >= 1, "N must be at least 1");
  require(k >= 2, "K must be at least 2");
  require(p_.downlink.rows() == k && p_.downlink.cols() == n, "F must be K x N");
  require(all_finite(p_.uplink) && all_finite(p_.downlink), "channels must be finite");

  if (p_.power_caps.size() == 0) p_.power_caps = p_.powers;
  if (p_.powers.size() == 0) p_.powers = p_.power_caps;
  if (p_.mse_weights.size() == 0) p_.mse_weights = RVector::Ones(k);
  if (p_.rate_weights.size() == 0) p_.rate_weights = RVector::Ones(k);
  require(p_.powers.size() == k && p_.power_caps.size() == k, "q and q_cap must have K entries");
  require(p_.mse_weights.size() == k && p_.rate_weights.size() == k, "weights must have K entries");

  for (Eigen::Index i = 0; i < k; ++i) {
    require(std::isfinite(p_.powers[i]) && p_.powers[i] >= 0.0, "q_i must be nonnegative");
    require(p_.powers[i] <= p_.power_caps[i] * (1.0 + 1e-12), "q_i must not exceed Q_i");
    require(p_.mse_weights[i] > 0.0 && p_.rate_weights[i] > 0.0, "weights must be positive");
  }
  require(std::isfinite(p_.relay_budget) && p_.relay_budget > 0.0, "P_r must be positive");
  require(std::isfinite(p_.relay_noise) && p_.relay_noise > 0.0, "gamma^2 must be positive");
  require(std::isfinite(p_.user_noise) && p_.user_noise > 0.0, "sigma^2 must be positive");

  const int full = static_cast<int>(std::min(n, k));
  require(linalg::rank(p_.uplink) == full, "H is rank deficient");
  require(linalg::rank(p_.downlink) == full, "F is rank deficient");
}

Scenario Scenario::unit_power(CMatrix uplink, CMatrix downlink, double noise_variance) {
  const auto k = uplink.cols();
  ScenarioParams p;
  p.uplink = std::move(uplink);
  p.downlink = std::move(downlink);
  p.power_caps = RVector::Ones(k);
  p.powers = p.power_caps;
  p.relay_budget = 1.0;
  p.relay_noise = noise_variance;
  p.user_noise = noise_variance;
  return Scenario(std::move(p));
}

Scenario Scenario::with_powers(const RVector& powers) const {
  ScenarioParams p = p_;
  p.powers = powers;
  return Scenario(std::move(p));
}

Scenario Scenario::with_noise(double relay_noise, double user_noise) const {
  ScenarioParams p = p_;
  p.relay_noise = relay_noise;
  p.user_noise = user_noise;
  return Scenario(std::move(p));
}

Scenario Scenario::with_weights(const RVector& mse_weights, const RVector& rate_weights) const {
  ScenarioParams p = p_;
  p.mse_weights = mse_weights;
  p.rate_weights = rate_weights;
  return Scenario(std::move(p));
}

}  // namespace mimo_switch
