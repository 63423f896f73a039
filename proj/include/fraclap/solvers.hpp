#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/singular.hpp"

namespace fraclap {

struct SolveConfig {
  double tol_residual = 1e-10;  ///< on ||.||_inf residuals
  int max_iter = 500;           ///< outer iteration budget
  double damping = 0.9;         ///< Newton fraction-to-boundary safeguard
  double prox_tol = 1e-12;      ///< per-node prox root tolerance
  double theta = 0.5;           ///< semilinear Picard damping
  double tol_outer = 1e-8;      ///< semilinear outer stopping tolerance

  void validate() const {
    if (!(tol_residual > 0.0 && prox_tol > 0.0 && tol_outer > 0.0))
      throw std::invalid_argument("SolveConfig: tolerances must be positive");
    if (!(damping > 0.0 && damping <= 1.0))
      throw std::invalid_argument("SolveConfig: damping must lie in (0,1]");
    if (!(theta > 0.0 && theta <= 1.0))
      throw std::invalid_argument("SolveConfig: theta must lie in (0,1]");
    if (max_iter < 1) throw std::invalid_argument("SolveConfig: max_iter must be >= 1");
  }
};

enum class SolvePath { torsion, u0, weak_newton, variational_min, semilinear };

inline const char* to_string(SolvePath p) {
  switch (p) {
    case SolvePath::torsion: return "torsion";
    case SolvePath::u0: return "u0";
    case SolvePath::weak_newton: return "weak_newton";
    case SolvePath::variational_min: return "variational_min";
    case SolvePath::semilinear: return "semilinear";
  }
  return "?";
}

enum class SolveFailure { none, max_iter, positivity_collapse, divergence };

inline const char* to_string(SolveFailure f) {
  switch (f) {
    case SolveFailure::none: return "none";
    case SolveFailure::max_iter: return "max_iter";
    case SolveFailure::positivity_collapse: return "positivity_collapse";
    case SolveFailure::divergence: return "divergence";
  }
  return "?";
}

struct SolveReport {
  Vec solution;
  int iterations = 0;
  double final_residual = 0.0;
  SolvePath path = SolvePath::torsion;
  std::optional<Vec> barrier_check;  ///< per-node slack min(u - lower, upper - u)
  std::optional<double> energy_value;
  bool converged = false;
  SolveFailure failure = SolveFailure::none;
  std::vector<double> residual_history;
  /// s >= dim/2 runs are numerically fine but sit outside the N > 2s
  /// hypothesis of the underlying theory; flagged for reports.
  bool outside_paper_hypotheses = false;
  std::string notes;
};

/// Closed-form torsion function of the interval: the solution of
/// (-Delta)^s u = 1 on (a,b), zero outside, is
///   u1(x) = Gamma(1/2) / (4^s Gamma(1/2+s) Gamma(1+s)) * (R^2 - (x-m)^2)^s
/// with R the half-width and m the midpoint. At s = 1/2 the prefactor is 1.
inline Vec torsion_exact(const Grid& grid, double s) {
  const double R = 0.5 * (grid.b - grid.a);
  const double mid = 0.5 * (grid.a + grid.b);
  const double k = std::tgamma(0.5) /
                   (std::pow(4.0, s) * std::tgamma(0.5 + s) * std::tgamma(1.0 + s));
  Vec u(grid.interior());
  for (int i = 0; i < grid.interior(); ++i) {
    const double d = grid.nodes[static_cast<std::size_t>(i)] - mid;
    u[i] = k * std::pow(R * R - d * d, s);
  }
  return u;
}

namespace detail {

inline Vec spd_solve(const Mat& M, const Vec& rhs) {
  Eigen::LLT<Mat> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("spd_solve: Cholesky failed on a matrix the operator invariants guarantee SPD (assembly bug)");
  Vec x = llt.solve(rhs);
  x += llt.solve(rhs - M * x);  // one refinement step
  return x;
}

inline double power_norm(const Mat& A, int iters = 100) {
  Vec x = Vec::Ones(A.rows()) / std::sqrt(static_cast<double>(A.rows()));
  double lam = 1.0;
  for (int i = 0; i < iters; ++i) {
    Vec y = A * x;
    lam = y.norm();
    if (lam == 0.0) return 0.0;
    x = y / lam;
  }
  return lam;
}

/// Smallest eigenvalue of an SPD matrix by inverse power iteration,
/// slightly deflated so the result is a safe lower bound.
inline double power_min_eig(const Mat& A, int iters = 100) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) return 0.0;
  Vec x = Vec::Ones(A.rows()) / std::sqrt(static_cast<double>(A.rows()));
  double nrm = 1.0;
  for (int i = 0; i < iters; ++i) {
    Vec y = llt.solve(x);
    nrm = y.norm();
    if (nrm == 0.0) return 0.0;
    x = y / nrm;
  }
  return 0.9 / nrm;
}

}  // namespace detail

/// Solves L u = 1 (the torsion problem). u > 0 at every interior node by
/// the maximum-principle structure of L.
inline SolveReport solve_torsion(const NonlocalOperator& op, const SolveConfig& cfg = {}) {
  cfg.validate();
  SolveReport rep;
  rep.path = SolvePath::torsion;
  rep.outside_paper_hypotheses = !op.order.sobolev_embedding_valid();
  const Vec one = Vec::Ones(op.grid.interior());
  rep.solution = detail::spd_solve(op.A, op.grid.h * one);
  rep.final_residual = weak_residual(op, rep.solution, one);
  rep.residual_history = {rep.final_residual};
  rep.iterations = 1;
  rep.converged = rep.final_residual <= cfg.tol_residual;
  if (!rep.converged) rep.failure = SolveFailure::max_iter;
  return rep;
}

/// Explicit sub/supersolution barriers built from a torsion solution:
///   upper  w_hat   = ((gamma+1) u1)^{1/(gamma+1)}
///   lower  w_check = ||u1||_inf^{-gamma/(gamma+1)} u1
struct BarrierPair {
  Vec lower;
  Vec upper;
};

inline BarrierPair barriers_from_torsion(const Vec& u1, double gamma) {
  const double uinf = u1.cwiseAbs().maxCoeff();
  BarrierPair bp{Vec(u1.size()), Vec(u1.size())};
  const double lower_scale = std::pow(uinf, -gamma / (gamma + 1.0));
  for (Eigen::Index i = 0; i < u1.size(); ++i) {
    bp.lower[i] = lower_scale * u1[i];
    bp.upper[i] = std::pow((gamma + 1.0) * u1[i], 1.0 / (gamma + 1.0));
  }
  return bp;
}

namespace detail {

struct NewtonResult {
  Vec u;
  int iters;
  double res;
  std::vector<double> history;
  bool converged;
  SolveFailure failure;
  int last_projection_iter;  // -1 if the bracket projection never fired
};

/// Damped Newton on R(u) = L u - u^{-gamma} - omega with fraction-to-boundary
/// positivity safeguard and optional projection onto [lower, upper].
inline NewtonResult newton_singular(const NonlocalOperator& op, double gamma, const Vec& omega,
                                    Vec u, const SolveConfig& cfg, const BarrierPair* bracket) {
  const int m = op.grid.interior();
  NewtonResult out{std::move(u), 0, 0.0, {}, false, SolveFailure::none, -1};
  Vec R(m), d(m);
  Mat J(m, m);
  int stagnation = 0;
  double prev_res = kPlusInf;
  for (int it = 0; it < cfg.max_iter; ++it) {
    for (int i = 0; i < m; ++i) R[i] = std::pow(out.u[i], -gamma);
    R = op.L * out.u - R - omega;
    out.res = R.cwiseAbs().maxCoeff();
    out.history.push_back(out.res);
    out.iters = it;
    if (out.res <= cfg.tol_residual) {
      out.converged = true;
      return out;
    }
    J = op.L;
    for (int i = 0; i < m; ++i) J(i, i) += gamma * std::pow(out.u[i], -gamma - 1.0);
    d = spd_solve(J, -R);
    // fraction to boundary: keep u + alpha d >= (1 - damping) u
    double alpha = 1.0;
    for (int i = 0; i < m; ++i)
      if (d[i] < 0.0) alpha = std::min(alpha, cfg.damping * out.u[i] / (-d[i]));
    out.u += alpha * d;
    if (bracket) {
      bool projected = false;
      for (int i = 0; i < m; ++i) {
        if (out.u[i] < bracket->lower[i]) out.u[i] = bracket->lower[i], projected = true;
        if (out.u[i] > bracket->upper[i]) out.u[i] = bracket->upper[i], projected = true;
      }
      if (projected) out.last_projection_iter = it;
    }
    if (out.u.minCoeff() <= 0.0 ||
        (alpha < 1e-12 && out.res >= prev_res)) {
      out.failure = SolveFailure::positivity_collapse;
      return out;
    }
    if (out.res >= prev_res && ++stagnation >= 25) {
      out.failure = SolveFailure::max_iter;
      return out;
    }
    prev_res = out.res;
  }
  for (int i = 0; i < m; ++i) R[i] = std::pow(out.u[i], -gamma);
  out.res = ((op.L * out.u) - R - omega).cwiseAbs().maxCoeff();
  out.history.push_back(out.res);
  out.iters = cfg.max_iter;
  out.converged = out.res <= cfg.tol_residual;
  if (!out.converged) out.failure = SolveFailure::max_iter;
  return out;
}

}  // namespace detail

/// Solves L u = u^{-gamma} (the pure singular problem) by damped Newton,
/// initialized at the supersolution w_hat and projected into the barrier
/// bracket [w_check, w_hat].
inline SolveReport solve_u0(const NonlocalOperator& op, const SingularPotential& sp,
                            const SolveConfig& cfg = {}) {
  cfg.validate();
  SolveReport torsion = solve_torsion(op, cfg);
  const BarrierPair bp = barriers_from_torsion(torsion.solution, sp.gamma);
  const Vec zero = Vec::Zero(op.grid.interior());
  auto nr = detail::newton_singular(op, sp.gamma, zero, bp.upper, cfg, &bp);

  SolveReport rep;
  rep.path = SolvePath::u0;
  rep.outside_paper_hypotheses = !op.order.sobolev_embedding_valid();
  rep.solution = std::move(nr.u);
  rep.iterations = nr.iters;
  rep.final_residual = nr.res;
  rep.residual_history = std::move(nr.history);
  rep.converged = nr.converged;
  rep.failure = nr.failure;
  Vec slack(op.grid.interior());
  for (int i = 0; i < op.grid.interior(); ++i)
    slack[i] = std::min(rep.solution[i] - bp.lower[i], bp.upper[i] - rep.solution[i]);
  rep.barrier_check = std::move(slack);
  if (nr.last_projection_iter >= 0 && nr.last_projection_iter >= nr.iters - 3)
    rep.notes = "bracket projection active in the final iterations";
  return rep;
}

/// Solves L u = u^{-gamma} + omega by damped Newton with the positivity
/// safeguard. Data pushing the solution to zero anywhere is reported as
/// positivity_collapse, never crossed.
inline SolveReport solve_weak_newton(const NonlocalOperator& op, const SingularPotential& sp,
                                     const Vec& omega, const SolveConfig& cfg = {}) {
  cfg.validate();
  if (omega.size() != op.grid.interior())
    throw std::invalid_argument("solve_weak_newton: omega size mismatch");
  SolveReport torsion = solve_torsion(op, cfg);
  const BarrierPair bp = barriers_from_torsion(torsion.solution, sp.gamma);
  auto nr = detail::newton_singular(op, sp.gamma, omega, bp.upper, cfg, nullptr);

  SolveReport rep;
  rep.path = SolvePath::weak_newton;
  rep.outside_paper_hypotheses = !op.order.sobolev_embedding_valid();
  rep.solution = std::move(nr.u);
  rep.iterations = nr.iters;
  rep.final_residual = nr.res;
  rep.residual_history = std::move(nr.history);
  rep.converged = nr.converged;
  rep.failure = nr.failure;
  return rep;
}

/// Minimizes J_omega over the displacement v = u - u0 by accelerated
/// proximal gradient iteration: step tau from a power-iteration bound on
/// ||A||, constant Nesterov momentum matched to the strong convexity of
/// the quadratic part (lower bound from inverse power iteration), a
/// gradient-style restart, and a halve-tau safeguard should the step
/// majorization ever fail. Stops when the prox-gradient residual
/// ||v - prox(v - tau grad)||_inf / tau falls below cfg.tol_residual.
/// Returns u = u0 + v with the energy value recorded.
inline SolveReport minimize_j_omega(const EnergyFunctional& E, const SolveConfig& cfg = {}) {
  cfg.validate();
  const int m = E.shifted.size();
  const double h = E.op.grid.h;
  const long budget = static_cast<long>(cfg.max_iter) * 20L;

  const double lip = 1.05 * std::max(detail::power_norm(E.op.A), 1e-300);
  double tau = 1.0 / lip;
  const double mu = std::max(detail::power_min_eig(E.op.A), 0.0);
  // momentum for a mu-strongly-convex composite with L-smooth part
  auto momentum = [&] {
    const double q = std::sqrt(std::min(1.0, mu * tau));
    return (1.0 - q) / (1.0 + q);
  };
  double beta = momentum();

  Vec v = Vec::Zero(m), y = v, z(m), vn(m);
  double res = kPlusInf;
  double res_last_check = kPlusInf;
  long it = 0;
  std::vector<double> history;

  auto prox_all = [&](const Vec& zz, Vec& out) {
    for (int i = 0; i < m; ++i) out[i] = prox_g0(E.shifted, i, zz[i], tau * h, cfg.prox_tol);
  };
  auto true_residual = [&](const Vec& vv) {
    Vec g = E.op.A * vv - h * E.omega;
    Vec zz = vv - tau * g;
    Vec pp(m);
    prox_all(zz, pp);
    return (vv - pp).cwiseAbs().maxCoeff() / tau;
  };
  auto smooth = [&](const Vec& vv) { return 0.5 * vv.dot(E.op.A * vv) - h * E.omega.dot(vv); };

  SolveReport rep;
  rep.path = SolvePath::variational_min;
  rep.outside_paper_hypotheses = !E.op.order.sobolev_embedding_valid();

  while (it < budget) {
    ++it;
    Vec grad = E.op.A * y - h * E.omega;
    z = y - tau * grad;
    prox_all(z, vn);
    const double step_res = (y - vn).cwiseAbs().maxCoeff() / tau;
    if (step_res <= cfg.tol_residual || it % 16 == 0) {
      res = true_residual(vn);
      history.push_back(res);
      if (res <= cfg.tol_residual) {
        v = vn;
        break;
      }
      // backtracking safeguard: halve tau when the step majorization fails
      // AND the residual stopped contracting (a genuine divergence signal,
      // as opposed to roundoff noise in the inequality near convergence)
      const double sy = smooth(y);
      const double svn = smooth(vn);
      const double slack_tol = 1e-12 * std::max({1.0, std::abs(sy), std::abs(svn)});
      const bool majorization_failed =
          svn > sy + grad.dot(vn - y) + (vn - y).squaredNorm() / (2.0 * tau) + slack_tol;
      if (majorization_failed && res >= res_last_check) {
        tau *= 0.5;
        beta = momentum();
        y = vn;
        v = vn;
        res_last_check = kPlusInf;
        continue;
      }
      res_last_check = res;
    }
    y = vn + beta * (vn - v);
    v = vn;
  }

  if (res > cfg.tol_residual) res = true_residual(v);
  rep.solution = E.shifted.u0 + v;
  rep.iterations = static_cast<int>(it);
  rep.final_residual = res;
  rep.residual_history = std::move(history);
  rep.converged = res <= cfg.tol_residual;
  if (!rep.converged) rep.failure = SolveFailure::max_iter;
  rep.energy_value = j_omega(E, v);
  return rep;
}

/// Right-hand side term g(x, u) of the semilinear problem together with the
/// machinery the decomposition needs: the shifted primitive
/// G1(x, t) = ∫_0^t g(x, u0(x) + sigma) d sigma and the growth audit data
/// |g(x,t)| <= a(x) + b |t|^{(N+2s)/(N-2s)}.
struct SemilinearTerm {
  std::function<double(double, double)> g;  ///< (x, t) -> g(x, t)
  /// primitive of g in its second argument: (x, t) -> ∫_0^t g(x, sigma) d sigma;
  /// used to evaluate G1 and the energy F
  std::function<double(double, double)> primitive;
  double a_bound = 0.0;  ///< constant-in-x audit bound a(x) ≡ a
  double b_bound = 0.0;
  std::string name = "custom";

  static SemilinearTerm zero() {
    return {[](double, double) { return 0.0; },
            [](double, double) { return 0.0; },
            0.0, 0.0, "zero"};
  }
  static SemilinearTerm constant(double c) {
    return {[c](double, double) { return c; },
            [c](double, double t) { return c * t; },
            std::abs(c), 0.0, "constant"};
  }
  /// g(x,t) = lambda * min(t, M); |g| <= lambda M + lambda |t|^p for any
  /// p >= 1, which covers the unbounded t < 0 branch
  static SemilinearTerm capped_linear(double lambda, double M) {
    return {[lambda, M](double, double t) { return lambda * std::min(t, M); },
            [lambda, M](double, double t) {
              if (t <= M) return 0.5 * lambda * t * t;
              return 0.5 * lambda * M * M + lambda * M * (t - M);
            },
            lambda * M, lambda, "capped_linear"};
  }

  double g1(double x, double u0x, double w) const { return g(x, u0x + w); }
  /// G1(x, w) = ∫_0^w g(x, u0(x) + sigma) d sigma
  double G1(double x, double u0x, double w) const {
    return primitive(x, u0x + w) - primitive(x, u0x);
  }
};

struct GrowthAudit {
  bool performed = false;
  bool passed = false;
  double worst_margin = 0.0;  ///< max over probes of |g| - (a + b|t|^p); <= 0 passes
};

/// Samples |g(x,t)| <= a + b |t|^{(N+2s)/(N-2s)} over the grid nodes and a
/// probe range of t. Skipped (performed = false) when the embedding
/// exponent does not exist (dim <= 2s).
inline GrowthAudit audit_growth(const NonlocalOperator& op, const SemilinearTerm& term,
                                double t_max = 16.0) {
  GrowthAudit audit;
  if (!op.order.sobolev_embedding_valid()) return audit;
  audit.performed = true;
  const double p = (op.order.dim + 2.0 * op.order.s) / (op.order.dim - 2.0 * op.order.s);
  double worst = -kPlusInf;
  for (double x : op.grid.nodes) {
    for (int j = -32; j <= 32; ++j) {
      const double tt = t_max * j / 32.0;
      const double margin = std::abs(term.g(x, tt)) -
                            (term.a_bound + term.b_bound * std::pow(std::abs(tt), p));
      worst = std::max(worst, margin);
    }
  }
  audit.worst_margin = worst;
  audit.passed = worst <= 1e-12;
  return audit;
}

/// Prox-gradient residual of the composite functional
///   F(w) = 1/2 w^T A w + h sum G0(x_i, w_i) - h sum G1(x_i, w_i)
/// at the displacement w: || w - prox_{tau h G0}(w - tau grad S_F(w)) ||_inf / tau
/// with S_F the C^1 part. A vanishing residual is the discrete sense in
/// which w is a critical point of F.
inline double composite_prox_residual(const NonlocalOperator& op, const ShiftedPotential& shifted,
                                      const SemilinearTerm& term, const Vec& w,
                                      double prox_tol = 1e-14) {
  const int m = op.grid.interior();
  const double h = op.grid.h;
  const double tau = 1.0 / (1.01 * std::max(detail::power_norm(op.A), 1e-300));
  Vec grad = op.A * w;
  for (int i = 0; i < m; ++i)
    grad[i] -= h * term.g1(op.grid.nodes[static_cast<std::size_t>(i)], shifted.u0[i], w[i]);
  Vec z = w - tau * grad;
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    const double pi = prox_g0(shifted, i, z[i], tau * h, prox_tol);
    worst = std::max(worst, std::abs(w[i] - pi));
  }
  return worst / tau;
}

/// Energy F(w) = Psi(w) + Phi_semilinear(w) of the decomposition.
inline double composite_energy(const NonlocalOperator& op, const ShiftedPotential& shifted,
                               const SemilinearTerm& term, const Vec& w) {
  const int m = op.grid.interior();
  const double h = op.grid.h;
  double acc = 0.5 * w.dot(op.A * w);
  for (int i = 0; i < m; ++i) {
    const double gi = g0(shifted, i, w[i]);
    if (gi == kPlusInf) return kPlusInf;
    const double x = op.grid.nodes[static_cast<std::size_t>(i)];
    acc += h * gi - h * term.G1(x, shifted.u0[i], w[i]);
  }
  return acc;
}

/// Solves L u = u^{-gamma} + g(x, u) by a damped Picard outer loop around
/// minimize_j_omega with frozen data omega_k = g(x, u_k). The decomposition
/// w = u - u0 is certified through the composite prox residual of F.
inline SolveReport solve_semilinear(const NonlocalOperator& op, const SingularPotential& sp,
                                    const SemilinearTerm& term, const SolveConfig& cfg = {}) {
  cfg.validate();
  const int m = op.grid.interior();
  const double h = op.grid.h;
  (void)h;

  SolveReport rep;
  rep.path = SolvePath::semilinear;
  rep.outside_paper_hypotheses = !op.order.sobolev_embedding_valid();

  const GrowthAudit audit = audit_growth(op, term);
  rep.notes = audit.performed
                  ? (audit.passed ? "growth audit passed" : "growth audit FAILED on probes")
                  : "growth audit skipped: embedding exponent undefined (dim <= 2s)";

  SolveReport u0_rep = solve_u0(op, sp, cfg);
  if (!u0_rep.converged) {
    rep.failure = u0_rep.failure;
    rep.solution = std::move(u0_rep.solution);
    rep.notes += "; anchor solve failed";
    return rep;
  }
  const ShiftedPotential shifted(sp, u0_rep.solution);

  auto inner_solve = [&](const Vec& omega) {
    EnergyFunctional E(op, shifted, omega);
    return minimize_j_omega(E, cfg);
  };

  Vec u = u0_rep.solution;
  Vec omega(m);
  double prev_delta = kPlusInf;
  int growth_streak = 0;
  bool outer_converged = false;
  for (int k = 0; k < cfg.max_iter; ++k) {
    for (int i = 0; i < m; ++i)
      omega[i] = term.g(op.grid.nodes[static_cast<std::size_t>(i)], u[i]);
    SolveReport inner = inner_solve(omega);
    if (!inner.converged) {
      rep.failure = inner.failure;
      rep.solution = u;
      rep.iterations = k;
      rep.notes += "; inner minimization failed";
      return rep;
    }
    Vec u_next = (1.0 - cfg.theta) * u + cfg.theta * inner.solution;
    const double delta = (u_next - u).cwiseAbs().maxCoeff();
    rep.residual_history.push_back(delta);
    u = std::move(u_next);
    rep.iterations = k + 1;
    if (delta <= cfg.tol_outer) {
      outer_converged = true;
      break;
    }
    growth_streak = (delta > prev_delta) ? growth_streak + 1 : 0;
    if (growth_streak >= 10) {
      rep.failure = SolveFailure::divergence;
      rep.solution = u;
      rep.notes += "; outer Picard iteration diverging (term too strong for the damped fixed point)";
      return rep;
    }
    prev_delta = delta;
  }
  if (!outer_converged) {
    rep.failure = SolveFailure::max_iter;
    rep.solution = u;
    return rep;
  }

  // two undamped polish steps at frozen data tighten the composite residual
  // well below tol_residual
  rep.solution = u;
  for (int polish = 0; polish < 2; ++polish) {
    for (int i = 0; i < m; ++i)
      omega[i] = term.g(op.grid.nodes[static_cast<std::size_t>(i)], rep.solution[i]);
    SolveReport last = inner_solve(omega);
    if (!last.converged) {
      rep.failure = last.failure;
      rep.notes += "; final inner minimization failed";
      return rep;
    }
    rep.solution = last.solution;
  }

  const Vec w = rep.solution - shifted.u0;
  rep.final_residual = composite_prox_residual(op, shifted, term, w);
  rep.energy_value = composite_energy(op, shifted, term, w);
  rep.converged = rep.final_residual <= cfg.tol_residual;
  if (!rep.converged) rep.failure = SolveFailure::max_iter;
  return rep;
}

}  // namespace fraclap
