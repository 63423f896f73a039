#pragma once

#include <cmath>
#include <stdexcept>

#include "fraclap/quadrature.hpp"

namespace fraclap {

/// Order s in (0,1) of the operator together with the ambient dimension N.
///
/// The analysis behind the solvers assumes N > 2s. For N = 1 this fails
/// once s >= 1/2: the operator, energy and all solves remain well defined,
/// but the Sobolev embedding exponent 2N/(N-2s) does not exist and growth
/// audits that need it are skipped. Reports label such runs as outside the
/// assumed hypotheses.
struct FractionalOrder {
  double s;
  int dim;

  explicit FractionalOrder(double s_, int dim_ = 1) : s(s_), dim(dim_) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("FractionalOrder: s must lie in (0,1)");
    if (dim < 1) throw std::invalid_argument("FractionalOrder: dim must be >= 1");
  }

  bool sobolev_embedding_valid() const { return static_cast<double>(dim) > 2.0 * s; }

  /// 2N/(N-2s); only defined when the embedding hypothesis N > 2s holds.
  double critical_exponent() const {
    if (!sobolev_embedding_valid())
      throw std::domain_error("FractionalOrder: 2N/(N-2s) undefined, requires dim > 2s");
    return 2.0 * dim / (dim - 2.0 * s);
  }
};

/// c_{N,s} = 4^s Gamma(N/2 + s) / (-pi^{N/2} Gamma(-s)), the constant that
/// matches the singular-integral form of the operator with the Fourier
/// multiplier |xi|^{2s}.
inline double normalizing_constant(const FractionalOrder& order) {
  const double s = order.s;
  const double n2 = order.dim / 2.0;
  const double c = std::pow(4.0, s) * std::tgamma(n2 + s) /
                   (-std::pow(M_PI, n2) * std::tgamma(-s));
  if (!(c > 0.0)) throw std::runtime_error("normalizing_constant: non-positive result");
  return c;
}

namespace detail {

/// ∫_A^∞ cos(x) x^{-p} dx by repeated integration by parts. The resulting
/// series is asymptotic in 1/A; terms are added while they keep shrinking.
inline double cosine_tail(double A, double p) {
  double total = 0.0;
  double coeff = 1.0;
  double q = p;
  bool cos_mode = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 24; ++k) {
    double term;
    if (cos_mode) {
      term = coeff * (-std::sin(A) * std::pow(A, -q));
      coeff *= q;
    } else {
      term = coeff * (std::cos(A) * std::pow(A, -q));
      coeff *= -q;
    }
    if (std::abs(term) > prev) break;  // asymptotic series turned
    total += term;
    prev = std::abs(term);
    q += 1.0;
    cos_mode = !cos_mode;
    if (prev < 1e-18) break;
  }
  return total;
}

/// ∫_A^∞ J0(r) r^{-p} dr via d/dr(r J1) = r J0 and J0' = -J1.
inline double bessel_tail(double A, double p) {
  double total = 0.0;
  double coeff = 1.0;
  double q = p;
  bool j0_mode = true;
  double prev = std::numeric_limits<double>::infinity();
  const double J0A = std::cyl_bessel_j(0.0, A);
  const double J1A = std::cyl_bessel_j(1.0, A);
  for (int k = 0; k < 24; ++k) {
    double term;
    if (j0_mode) {
      term = coeff * (-std::pow(A, -q) * J1A);
      coeff *= (q + 1.0);
    } else {
      term = coeff * (J0A * std::pow(A, -q));
      coeff *= -q;
    }
    if (std::abs(term) > prev) break;
    total += term;
    prev = std::abs(term);
    q += 1.0;
    j0_mode = !j0_mode;
    if (prev < 1e-18) break;
  }
  return total;
}

}  // namespace detail

/// Evaluates c_{N,s} through its defining integral
///   c = ( ∫_{R^N} (1 - cos xi_1) / |xi|^{N+2s} dxi )^{-1}
/// by quadrature, independently of the Gamma-function expression.
/// Supported for N in {1, 2} (the cross-check domain); the N = 2 case is
/// reduced to a radial integral against the Bessel function J0.
inline double normalizing_constant_integral(const FractionalOrder& order,
                                            double rel_tol = 1e-10) {
  const double s = order.s;
  const double x0 = 1.0;
  const double A = 50.0;
  double integral = 0.0;
  if (order.dim == 1) {
    // series head on (0, x0]: 1 - cos x = sum (-1)^{m+1} x^{2m} / (2m)!
    double head = 0.0;
    double fact = 1.0;  // (2m)!
    for (int m = 1; m <= 24; ++m) {
      fact *= (2.0 * m - 1.0) * (2.0 * m);
      const double term = ((m % 2 == 1) ? 1.0 : -1.0) *
                          std::pow(x0, 2.0 * m - 2.0 * s) / (fact * (2.0 * m - 2.0 * s));
      head += term;
      if (std::abs(term) < 1e-18 * std::abs(head)) break;
    }
    const double mid = quadrature::integrate(
        [s](double x) { return (1.0 - std::cos(x)) * std::pow(x, -1.0 - 2.0 * s); },
        x0, A, rel_tol);
    const double tail = std::pow(A, -2.0 * s) / (2.0 * s) - detail::cosine_tail(A, 1.0 + 2.0 * s);
    integral = 2.0 * (head + mid + tail);
  } else if (order.dim == 2) {
    // radial reduction: ∫_{R^2} = 2 pi ∫_0^∞ (1 - J0(r)) r^{-1-2s} dr,
    // 1 - J0(r) = sum (-1)^{m+1} (r/2)^{2m} / (m!)^2
    double head = 0.0;
    double msq = 1.0;  // (m!)^2
    for (int m = 1; m <= 24; ++m) {
      msq *= static_cast<double>(m) * m;
      const double term = ((m % 2 == 1) ? 1.0 : -1.0) * std::pow(x0, 2.0 * m - 2.0 * s) /
                          (std::pow(4.0, m) * msq * (2.0 * m - 2.0 * s));
      head += term;
      if (std::abs(term) < 1e-18 * std::abs(head)) break;
    }
    const double mid = quadrature::integrate(
        [s](double r) {
          return (1.0 - std::cyl_bessel_j(0.0, r)) * std::pow(r, -1.0 - 2.0 * s);
        },
        x0, A, rel_tol);
    const double tail = std::pow(A, -2.0 * s) / (2.0 * s) - detail::bessel_tail(A, 1.0 + 2.0 * s);
    integral = 2.0 * M_PI * (head + mid + tail);
  } else {
    throw std::domain_error("normalizing_constant_integral: quadrature path implemented for N in {1,2}");
  }
  return 1.0 / integral;
}

}  // namespace fraclap
