#pragma once

#include <cmath>

#include "vortexflow/core.hpp"

namespace vortexflow {

/// Smoothed Heaviside of x = phi / epsilon: 1 for x <= -1, 0 for x >= 1,
/// (1 - x - sin(pi x) / pi) / 2 in between. Non-increasing and C1.
inline double smoothed_heaviside(double x) {
  if (x <= -1.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return 0.5 * (1.0 - x - std::sin(kPi * x) / kPi);
}

/// Smoothing distribution zeta = -dH/dx = (1 + cos(pi x)) / 2 on |x| < 1.
/// Integrates to one.
inline double smoothing_delta(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * x));
}

}  // namespace vortexflow
