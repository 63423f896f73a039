#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fraclap {

/// Thrown when an adaptive integration cannot certify the requested
/// relative tolerance.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

namespace quadrature {

/// Adaptive Gauss-Kronrod integration of f over [a, b].
/// Throws QuadratureError if the error estimate exceeds rel_tol * |value|
/// (with an absolute floor for values near zero).
template <class F>
double integrate(F&& f, double a, double b, double rel_tol,
                 double abs_floor = 1e-300) {
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, /*max_depth=*/18, /*tol=*/rel_tol, &err);
  const double scale = std::max(std::abs(value), abs_floor);
  if (!(err <= 10.0 * rel_tol * scale) || !std::isfinite(value)) {
    throw QuadratureError("adaptive quadrature failed to reach relative tolerance " +
                          std::to_string(rel_tol) + " (estimate " +
                          std::to_string(err) + ", value " + std::to_string(value) + ")");
  }
  return value;
}

}  // namespace quadrature
}  // namespace fraclap
