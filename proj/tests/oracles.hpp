// Test-only oracles, independent of the library's closed forms: direct
// adaptive quadrature of defining integrals.
#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>

namespace oracles {

inline double gk(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-11) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 16, tol);
}

/// Gagliardo seminorm squared of a smooth compactly supported profile f on
/// [-support, support], by the correlation reduction
///   [f]^2 = 2 * integral_0^inf r^{-1-2s} C(r) dr,
///   C(r)  = integral (f(x+r) - f(x))^2 dx,
/// with the exact constant tail C(r) = 2 int f^2 for r >= 2*support.
inline double seminorm_sq(const std::function<double(double)>& f, double support, double s) {
  auto corr = [&](double r) {
    return gk([&](double x) { const double d = f(x + r) - f(x); return d * d; },
              -support - r, support, 1e-12);
  };
  const double span = 2.0 * support;
  // graded substitution r = t^4 tames the r^{1-2s} endpoint behavior
  const double head = gk(
      [&](double t) {
        const double r = t * t * t * t;
        if (r == 0.0) return 0.0;
        return std::pow(r, -1.0 - 2.0 * s) * corr(r) * 4.0 * t * t * t;
      },
      0.0, std::pow(0.5, 0.25), 1e-10);
  const double mid = gk([&](double r) { return std::pow(r, -1.0 - 2.0 * s) * corr(r); }, 0.5,
                        span, 1e-10);
  const double f2 = gk([&](double x) { return f(x) * f(x); }, -support, support, 1e-12);
  const double tail = 2.0 * f2 * std::pow(span, -2.0 * s) / (2.0 * s);
  return 2.0 * (head + mid + tail);
}

}  // namespace oracles
