#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fraclap/quadrature.hpp"

namespace fraclap {

// Dimensionless stiffness coefficients of the 1-D fractional energy form on
// a uniform grid with continuous piecewise-linear (hat) basis functions.
//
// With phi_i the hat at node i and spacing h, the exact kernel integral
//   B(phi_i, phi_j) = ∬ (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) |x-y|^{-1-2s} dx dy
// reduces, by writing the differences as integrals of the (piecewise
// constant) derivatives, to fourth differences of the double primitive of
// the kernel:
//   B(phi_i, phi_j) = 2 h^{1-2s} * lag(|i-j|),
//   lag(k) = -[Gh(k+2) - 4 Gh(k+1) + 6 Gh(k) - 4 Gh(k-1) + Gh(k-2)],
//   Gh(r)  = |r|^{3-2s} / (2s (2s-1) (2-2s) (3-2s))       (s != 1/2),
//   Gh(r)  = -r^2 ln|r| / 2                               (s  = 1/2).
//
// lag(0) > 0 and the energy matrix h^{1-2s} c_{N,s} lag(|i-j|) is SPD for
// all s in (0,1). lag(k) < 0 for every k >= 1 when s >~ 0.2366; below that
// threshold the exact energy form provably has a positive lag-1 entry, so
// the discrete maximum-principle structure is a verified property of the
// assembled operator, not an unconditional one (see NonlocalOperator).
namespace stiffness {

namespace detail {

inline long double g_hat(long double r, double s) {
  r = std::fabs(r);
  if (r == 0.0L) return 0.0L;
  if (s == 0.5) return -r * r * std::log(r) / 2.0L;
  const long double ts = static_cast<long double>(s);
  const long double D = 2.0L * ts * (2.0L * ts - 1.0L) * (2.0L - 2.0L * ts) * (3.0L - 2.0L * ts);
  return std::pow(r, 3.0L - 2.0L * ts) / D;
}

inline long double lag_direct(double s, long k) {
  const long double r = static_cast<long double>(k);
  return -(g_hat(r + 2, s) - 4.0L * g_hat(r + 1, s) + 6.0L * g_hat(r, s) -
           4.0L * g_hat(r - 1, s) + g_hat(r - 2, s));
}

// Large-lag expansion: the centered fourth difference equals
// sum_{m>=2} (2^{2m+1} - 8)/(2m)! * Gh^{(2m)}(k), convergent for k > 2 and
// numerically far better than the direct difference once k is large.
inline long double lag_series(double s, long k) {
  const long double kk = static_cast<long double>(k);
  long double total = 0.0L;
  long double fact = 24.0L;   // (2m)! at m = 2
  long double pw4 = 32.0L;    // 2^{2m+1} at m = 2
  if (s == 0.5) {
    // d^{2m}/dr^{2m} [-r^2 ln r / 2] = (2m-3)! r^{2-2m} for m >= 2
    long double dfact = 1.0L;  // (2m-3)! at m = 2
    for (int m = 2; m <= 40; ++m) {
      const long double cm = (pw4 - 8.0L) / fact;
      const long double term = cm * dfact * std::pow(kk, 2.0L - 2.0L * m);
      total += term;
      if (std::fabs(term) < 1e-24L * std::fabs(total)) break;
      fact *= (2.0L * m + 1.0L) * (2.0L * m + 2.0L);
      pw4 *= 4.0L;
      dfact *= (2.0L * m - 2.0L) * (2.0L * m - 1.0L);
    }
  } else {
    const long double beta = 3.0L - 2.0L * static_cast<long double>(s);
    const long double ts = static_cast<long double>(s);
    const long double D = 2.0L * ts * (2.0L * ts - 1.0L) * (2.0L - 2.0L * ts) * (3.0L - 2.0L * ts);
    long double falling = beta * (beta - 1.0L) * (beta - 2.0L) * (beta - 3.0L);
    for (int m = 2; m <= 40; ++m) {
      const long double cm = (pw4 - 8.0L) / fact;
      const long double term = cm * falling * std::pow(kk, beta - 2.0L * m) / D;
      total += term;
      if (std::fabs(term) < 1e-24L * std::fabs(total)) break;
      fact *= (2.0L * m + 1.0L) * (2.0L * m + 2.0L);
      pw4 *= 4.0L;
      falling *= (beta - 2.0L * m) * (beta - 2.0L * m - 1.0L);
    }
  }
  return -total;
}

}  // namespace detail

/// Exact lag coefficient (reference spacing h = 1, no c_{N,s} factor).
/// Energy matrix entry: A_ij = c_{N,s} h^{1-2s} lag(s, |i-j|).
inline double lag(double s, long k) {
  if (k < 0) k = -k;
  if (k <= 24) return static_cast<double>(detail::lag_direct(s, k));
  return static_cast<double>(detail::lag_series(s, k));
}

/// All coefficients lag(s, 0..max_lag).
inline std::vector<double> lags(double s, long max_lag) {
  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
  for (long k = 0; k <= max_lag; ++k) out[static_cast<std::size_t>(k)] = lag(s, k);
  return out;
}

namespace detail {

/// Autocorrelation of the unit hat, Lambda(t) = ∫ phi(x) phi(x+t) dx: the
/// even piecewise cubic with Lambda(0) = 2/3 and support [-2, 2].
inline double hat_autocorrelation(double t) {
  const double a = std::fabs(t);
  if (a >= 2.0) return 0.0;
  if (a <= 1.0) return (3.0 * a * a * a - 6.0 * a * a + 4.0) / 6.0;
  const double w = 2.0 - a;
  return w * w * w / 6.0;
}

// Correlation C_k(r) = ∫ (phi_0(x+r) - phi_0(x)) (phi_k(x+r) - phi_k(x)) dx
//                    = 2 Lambda(k) - Lambda(k-r) - Lambda(k+r).
// For 0 <= r <= 1 the second difference collapses to an exact polynomial,
// which avoids the cancellation that would otherwise be amplified by the
// r^{-1-2s} kernel factor.
inline double hat_correlation(long k, double r) {
  if (r <= 1.0) {
    switch (k) {
      case 0: return (2.0 - r) * r * r;
      case 1: return (2.0 / 3.0 * r - 1.0) * r * r;
      case 2: return -r * r * r / 6.0;
      default: return 0.0;
    }
  }
  const double kd = static_cast<double>(k);
  return 2.0 * hat_autocorrelation(kd) - hat_autocorrelation(kd - r) -
         hat_autocorrelation(kd + r);
}

}  // namespace detail

/// Same lag coefficient evaluated through the defining kernel integral,
/// reduced to one dimension by the correlation identity
///   B(phi_0, phi_k) = 2 ∫_0^∞ r^{-1-2s} C_k(r) dr:
/// exact integration of the polynomial piece of C_k on [0, 1/2], adaptive
/// Gauss-Kronrod up to the support span, and the exact constant tail
/// beyond it. Independent of the fourth-difference closed forms above;
/// validates them and serves as the fallback where they would be
/// numerically unstable.
inline double lag_quadrature(double s, long k, double rel_tol = 1e-10) {
  if (k < 0) k = -k;
  const double span = static_cast<double>(k) + 2.0;
  const double r0 = 0.5;
  // ∫_0^{r0} r^{-1-2s} C_k(r) dr with C_k the exact cubic on [0,1]:
  // ∫ r^{-1-2s} (c2 r^2 + c3 r^3) = c2 r0^{2-2s}/(2-2s) + c3 r0^{3-2s}/(3-2s)
  double c2 = 0.0, c3 = 0.0;
  if (k == 0) c2 = 2.0, c3 = -1.0;
  if (k == 1) c2 = -1.0, c3 = 2.0 / 3.0;
  if (k == 2) c3 = -1.0 / 6.0;
  const double head = c2 * std::pow(r0, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) +
                      c3 * std::pow(r0, 3.0 - 2.0 * s) / (3.0 - 2.0 * s);
  const double mid = quadrature::integrate(
      [s, k](double r) { return std::pow(r, -1.0 - 2.0 * s) * detail::hat_correlation(k, r); },
      r0, span, rel_tol);
  const double overlap_mass = (k == 0) ? 2.0 / 3.0 : (k == 1 ? 1.0 / 6.0 : 0.0);
  const double tail = 2.0 * overlap_mass * std::pow(span, -2.0 * s) / (2.0 * s);
  // B/2 = head + mid + tail and lag = B/2
  return head + mid + tail;
}

}  // namespace stiffness
}  // namespace fraclap
