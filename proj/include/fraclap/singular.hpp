#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fraclap/operator.hpp"

namespace fraclap {

inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();

/// The singular nonlinearity t^{-gamma}. Phi is its primitive anchored at 1:
///   Phi(t) = -∫_1^t tau^{-gamma} d tau   (t >= 0),   +inf for t < 0.
/// Extended-real values are plain doubles where +inf is the sentinel; no
/// operation here produces NaN or -inf.
struct SingularPotential {
  double gamma;
  explicit SingularPotential(double gamma_) : gamma(gamma_) {
    if (!(gamma > 0.0)) throw std::invalid_argument("SingularPotential: gamma must be > 0");
  }
};

inline double phi(const SingularPotential& sp, double t) {
  const double g = sp.gamma;
  if (t < 0.0) return kPlusInf;
  if (t == 0.0) return g < 1.0 ? 1.0 / (1.0 - g) : kPlusInf;
  if (g == 1.0) return -std::log(t);
  return (1.0 - std::pow(t, 1.0 - g)) / (1.0 - g);
}

/// Convex shift of Phi anchored at a strictly positive u0:
///   G0(x_i, v) = Phi(u0_i + v) - Phi(u0_i) + v u0_i^{-gamma},
/// so G0(x_i, 0) = 0, G0 is convex, and +inf exactly where u0_i + v leaves
/// the domain of Phi.
struct ShiftedPotential {
  SingularPotential potential;
  Vec u0;
  Vec u0_pow_mg;  ///< u0_i^{-gamma}, precomputed

  ShiftedPotential(const SingularPotential& sp, const Vec& anchor)
      : potential(sp), u0(anchor), u0_pow_mg(anchor.size()) {
    for (Eigen::Index i = 0; i < u0.size(); ++i) {
      if (!(u0[i] > 0.0))
        throw std::invalid_argument("ShiftedPotential: anchor must be strictly positive");
      u0_pow_mg[i] = std::pow(u0[i], -sp.gamma);
    }
  }

  int size() const { return static_cast<int>(u0.size()); }
};

inline double g0(const ShiftedPotential& shift, int i, double v) {
  const double u0i = shift.u0[i];
  const double t = u0i + v;
  if (t < 0.0) return kPlusInf;
  const double p = phi(shift.potential, t);
  if (p == kPlusInf) return kPlusInf;
  return p - phi(shift.potential, u0i) + v * shift.u0_pow_mg[i];
}

/// d/dv G0(x_i, v) = u0_i^{-gamma} - (u0_i + v)^{-gamma}; requires
/// u0_i + v > 0. Nondecreasing, zero at v = 0.
inline double dg0(const ShiftedPotential& shift, int i, double v) {
  const double t = shift.u0[i] + v;
  if (!(t > 0.0)) throw std::domain_error("dg0: u0 + v must be positive");
  return shift.u0_pow_mg[i] - std::pow(t, -shift.potential.gamma);
}

/// prox_{tau G0(x_i, .)}(z): the unique v > -u0_i with
///   v - z + tau * dg0(i, v) = 0,
/// by bisection-safeguarded Newton on the bracket (-u0_i, max(z, 0)].
inline double prox_g0(const ShiftedPotential& shift, int i, double z, double tau,
                      double tol = 1e-12) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_g0: tau must be > 0");
  const double u0i = shift.u0[i];
  const double g = shift.potential.gamma;
  const double c0 = shift.u0_pow_mg[i];
  auto f = [&](double v) { return v - z + tau * (c0 - std::pow(u0i + v, -g)); };

  double lo = -u0i;           // f -> -inf as v -> -u0i+
  double hi = std::max(z, 0.0);
  if (!(f(hi) >= 0.0)) {
    // can only occur through roundoff at the theoretical upper end;
    // expand once before declaring the anchor corrupted
    double span = std::max(1.0, std::abs(z));
    int tries = 0;
    while (f(hi) < 0.0 && tries++ < 60) hi += span, span *= 2.0;
    if (f(hi) < 0.0) throw std::runtime_error("prox_g0: root not enclosed (corrupted anchor?)");
  }

  double v = std::min(hi, 0.0);
  if (!(v > lo)) v = lo + 0.5 * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    const double fv = f(v);
    if (fv > 0.0) hi = v; else lo = v;
    const double dfv = 1.0 + tau * g * std::pow(u0i + v, -g - 1.0);
    double vn = v - fv / dfv;
    if (!(vn > lo && vn < hi)) vn = 0.5 * (lo + hi);
    if (std::abs(vn - v) <= tol * std::max(1.0, std::abs(vn))) {
      v = vn;
      break;
    }
    v = vn;
  }
  return v;
}

/// Discrete energy J_omega anchored at u0, in the displacement variable
/// v = u - u0:
///   J(v) = 1/2 v^T A v + h sum_i G0(x_i, v_i) - h sum_i omega_i v_i.
/// The quadratic term realizes (c_{N,s}/4) [v]^2 because v^T A v equals
/// (c/2) [v]^2; the midpoint rule h*sum discretizes the integrals over
/// Omega. J(0) = 0 and J is strictly convex and coercive.
struct EnergyFunctional {
  const NonlocalOperator& op;
  ShiftedPotential shifted;
  Vec omega;
  double value_at_anchor = 0.0;

  EnergyFunctional(const NonlocalOperator& op_, ShiftedPotential shifted_, Vec omega_)
      : op(op_), shifted(std::move(shifted_)), omega(std::move(omega_)) {
    if (shifted.size() != op.grid.interior() || omega.size() != shifted.size())
      throw std::invalid_argument("EnergyFunctional: size mismatch");
  }
};

inline double j_omega(const EnergyFunctional& E, const Vec& v) {
  const double h = E.op.grid.h;
  double barrier_sum = 0.0;
  for (int i = 0; i < E.shifted.size(); ++i) {
    const double gi = g0(E.shifted, i, v[i]);
    if (gi == kPlusInf) return kPlusInf;
    barrier_sum += gi;
  }
  return 0.5 * v.dot(E.op.A * v) + h * barrier_sum - h * E.omega.dot(v);
}

/// Analytic gradient A v + h dg0(., v) - h omega; defined where J is finite
/// and strictly inside the barrier.
inline Vec j_omega_gradient(const EnergyFunctional& E, const Vec& v) {
  const double h = E.op.grid.h;
  Vec grad = E.op.A * v - h * E.omega;
  for (int i = 0; i < E.shifted.size(); ++i) grad[i] += h * dg0(E.shifted, i, v[i]);
  return grad;
}

}  // namespace fraclap
