#pragma once

#include <cmath>
#include <limits>

#include "fraclap/grid.hpp"
#include "fraclap/operator.hpp"

namespace fraclap {

// Data profiles omega used by the CLI, the cross-validation battery and the
// tests. All are grid functions (pointwise samples at interior nodes).

inline Vec omega_zero(const Grid& grid) { return Vec::Zero(grid.interior()); }

inline Vec omega_constant(const Grid& grid, double c) {
  return Vec::Constant(grid.interior(), c);
}

/// One positive arch: amplitude * sin(pi (x - a) / (b - a)).
inline Vec omega_sin(const Grid& grid, double amplitude = 1.0) {
  Vec w(grid.interior());
  for (int i = 0; i < grid.interior(); ++i)
    w[i] = amplitude * std::sin(M_PI * (grid.nodes[static_cast<std::size_t>(i)] - grid.a) /
                                (grid.b - grid.a));
  return w;
}

/// Smooth compactly supported bump
///   amplitude * exp(1 - 1/(1 - rho^2)),  rho = (x - center)/width,
/// zero outside |rho| < 1. Defaults: centered, width (b-a)/4.
inline Vec omega_bump(const Grid& grid, double amplitude = 1.0,
                      double center = std::numeric_limits<double>::quiet_NaN(),
                      double width = 0.0) {
  if (std::isnan(center)) center = 0.5 * (grid.a + grid.b);
  if (width <= 0.0) width = 0.25 * (grid.b - grid.a);
  Vec w = Vec::Zero(grid.interior());
  for (int i = 0; i < grid.interior(); ++i) {
    const double rho = (grid.nodes[static_cast<std::size_t>(i)] - center) / width;
    if (std::abs(rho) < 1.0) w[i] = amplitude * std::exp(1.0 - 1.0 / (1.0 - rho * rho));
  }
  return w;
}

}  // namespace fraclap
