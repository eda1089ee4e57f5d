#pragma once

#include <cstdint>
#include <limits>

#include "mimo_switch/types.hpp"

namespace mimo_switch::detail {

inline constexpr int kMaxVertexUsers = 20;

inline void check_vertex_capacity(int k) {
  if (k > kMaxVertexUsers)
    throw CapabilityError("power control enumerates 2^K vertices; K > 20 is not supported");
}

// Best point of {0, Q_i}^K whose relay power stays within budget. The current powers are
// always a candidate, so the result never does worse than standing still.
template <class Objective, class Power>
RVector best_vertex(const RVector& caps, const RVector& current, double budget, Objective objective,
                    Power power, bool maximize) {
  const int k = static_cast<int>(caps.size());
  RVector best = current;
  double best_value = objective(current);
  const double limit = budget * (1.0 + 1e-10);
  RVector v(k);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
    for (int i = 0; i < k; ++i) v[i] = (mask >> i) & 1u ? caps[i] : 0.0;
    if (power(v) > limit) continue;
    const double value = objective(v);
    if (maximize ? value > best_value : value < best_value) {
      best_value = value;
      best = v;
    }
  }
  return best;
}

}  // namespace mimo_switch::detail
