#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "fraclap/profiles.hpp"
#include "fraclap/solvers.hpp"

using namespace fraclap;

TEST_CASE("torsion prefactor identity at N=1, s=1/2", "[solvers]") {
  // Gamma(N/2) / (4^s Gamma(N/2+s) Gamma(1+s)) = 1 at N = 1, s = 1/2
  const double k = std::tgamma(0.5) / (std::pow(4.0, 0.5) * std::tgamma(1.0) * std::tgamma(1.5));
  REQUIRE(k == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("torsion solve approaches the closed form", "[solvers]") {
  double prev_center = kPlusInf, prev_half = kPlusInf;
  for (int n : {128, 256, 512}) {
    const Grid grid = build_grid(-1.0, 1.0, n);
    const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
    const SolveReport rep = solve_torsion(op);
    REQUIRE(rep.converged);
    REQUIRE(rep.final_residual <= 1e-10);
    REQUIRE(rep.solution.minCoeff() > 0.0);

    const int mid = n / 2 - 1;             // node at x = 0
    const int right = 3 * n / 4 - 1;       // node at x = 0.5
    const double ec = std::abs(rep.solution[mid] - 1.0);
    const double eh = std::abs(rep.solution[right] - std::sqrt(0.75));
    REQUIRE(ec < prev_center);
    REQUIRE(eh < prev_half);
    prev_center = ec;
    prev_half = eh;
  }
  REQUIRE(prev_center <= 2e-3);
  REQUIRE(prev_half <= 2e-3);
}

TEST_CASE("torsion is positive for every s", "[solvers]") {
  for (double s : {0.25, 0.5, 0.75, 0.9}) {
    const Grid grid = build_grid(-1.0, 1.0, 64);
    const NonlocalOperator op = assemble(grid, FractionalOrder(s));
    const SolveReport rep = solve_torsion(op);
    REQUIRE(rep.converged);
    REQUIRE(rep.solution.minCoeff() > 0.0);
  }
}

TEST_CASE("u0 solve: residual contract and barrier bracket", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 256);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SolveReport rep = solve_u0(op, SingularPotential(1.0));
  REQUIRE(rep.converged);
  REQUIRE(rep.final_residual <= 1e-10);
  REQUIRE(rep.path == SolvePath::u0);

  Vec rhs(grid.interior());
  for (int i = 0; i < grid.interior(); ++i) rhs[i] = 1.0 / rep.solution[i];
  REQUIRE(weak_residual(op, rep.solution, rhs) <= 1e-10);

  // gamma = 1 on (-1,1): 1 <= u0(0) <= sqrt(2) since ||u1||_inf -> 1
  const double center = rep.solution[grid.interior() / 2];
  REQUIRE(center >= 1.0 - 5e-3);
  REQUIRE(center <= std::sqrt(2.0) + 5e-3);

  REQUIRE(rep.barrier_check.has_value());
  REQUIRE(rep.barrier_check->minCoeff() >= -1e-12);  // sandwich holds nodewise
}

TEST_CASE("u0 across the gamma range stays positive and converged", "[solvers]") {
  for (double s : {0.25, 0.75}) {
    for (double gamma : {0.5, 2.0, 4.0}) {
      const Grid grid = build_grid(-1.0, 1.0, 128);
      const NonlocalOperator op = assemble(grid, FractionalOrder(s));
      const SolveReport rep = solve_u0(op, SingularPotential(gamma));
      INFO("s=" << s << " gamma=" << gamma);
      REQUIRE(rep.converged);
      REQUIRE(rep.solution.minCoeff() > 0.0);
      REQUIRE(rep.outside_paper_hypotheses == (1.0 <= 2.0 * s));
    }
  }
}

TEST_CASE("weak newton with omega = 0 coincides with u0", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 128);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SingularPotential sp(2.0);
  const SolveReport a = solve_u0(op, sp);
  const SolveReport b = solve_weak_newton(op, sp, omega_zero(grid));
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  REQUIRE(b.final_residual <= 1e-10);
  REQUIRE((a.solution - b.solution).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("weak newton: larger data gives larger solution", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 128);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SingularPotential sp(1.0);
  const SolveReport u0_rep = solve_u0(op, sp);
  const SolveReport one = solve_weak_newton(op, sp, omega_constant(grid, 1.0));
  REQUIRE(one.converged);
  REQUIRE(((one.solution - u0_rep.solution).array() >= -1e-9).all());
}

TEST_CASE("minimizer at omega = 0 stays at the anchor", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 128);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SingularPotential sp(1.0);
  const SolveReport u0_rep = solve_u0(op, sp);
  EnergyFunctional E(op, ShiftedPotential(sp, u0_rep.solution), omega_zero(grid));
  const SolveReport rep = minimize_j_omega(E);
  REQUIRE(rep.converged);
  REQUIRE((rep.solution - u0_rep.solution).cwiseAbs().maxCoeff() <= 1e-6);
  REQUIRE(rep.energy_value.has_value());
  REQUIRE(*rep.energy_value == 0.0);
}

TEST_CASE("cross-path agreement for several data profiles", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 128);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SingularPotential sp(1.0);
  const SolveReport u0_rep = solve_u0(op, sp);
  REQUIRE(u0_rep.converged);

  const Vec profiles[5] = {omega_zero(grid), omega_constant(grid, 1.0), omega_sin(grid),
                           omega_bump(grid), omega_bump(grid, -0.2)};
  for (const Vec& w : profiles) {
    const SolveReport weak = solve_weak_newton(op, sp, w);
    EnergyFunctional E(op, ShiftedPotential(sp, u0_rep.solution), w);
    const SolveReport mini = minimize_j_omega(E);
    REQUIRE(weak.converged);
    REQUIRE(mini.converged);
    REQUIRE((weak.solution - mini.solution).cwiseAbs().maxCoeff() <= 1e-6);
    REQUIRE(weak.solution.minCoeff() > 0.0);
    // minimizer certificate: energy no larger than the anchor value 0
    REQUIRE(*mini.energy_value <= 1e-12);
  }
}

TEST_CASE("monotone data gives monotone solutions", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 96);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.25));
  const SingularPotential sp(2.0);
  const Vec lo = omega_bump(grid, -0.2);
  const Vec hi = omega_bump(grid, 1.0);
  const SolveReport a = solve_weak_newton(op, sp, lo);
  const SolveReport b = solve_weak_newton(op, sp, hi);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  REQUIRE(((a.solution - b.solution).array() <= 1e-9).all());
}

TEST_CASE("semilinear: degenerate and constant terms reduce correctly", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 96);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SingularPotential sp(1.0);

  const SolveReport u0_rep = solve_u0(op, sp);
  const SolveReport zero = solve_semilinear(op, sp, SemilinearTerm::zero());
  REQUIRE(zero.converged);
  REQUIRE((zero.solution - u0_rep.solution).cwiseAbs().maxCoeff() <= 1e-8);
  REQUIRE(zero.final_residual <= 1e-8);

  const SolveReport cst = solve_semilinear(op, sp, SemilinearTerm::constant(0.7));
  const SolveReport direct = solve_weak_newton(op, sp, omega_constant(grid, 0.7));
  REQUIRE(cst.converged);
  REQUIRE((cst.solution - direct.solution).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("semilinear capped-linear term converges with a small F residual", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 96);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SingularPotential sp(1.0);
  const SemilinearTerm term = SemilinearTerm::capped_linear(0.1, 10.0);
  const SolveReport rep = solve_semilinear(op, sp, term);
  REQUIRE(rep.converged);
  REQUIRE(rep.final_residual <= 1e-6);
  REQUIRE(rep.energy_value.has_value());
  // the audit cannot run at s = 1/2 in one dimension
  REQUIRE(rep.notes.find("skipped") != std::string::npos);
}

TEST_CASE("growth audit runs when the embedding exponent exists", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 48);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.25));
  GrowthAudit audit = audit_growth(op, SemilinearTerm::capped_linear(0.1, 10.0));
  REQUIRE(audit.performed);
  REQUIRE(audit.passed);  // |lambda min(t,M)| <= lambda M

  GrowthAudit skipped = audit_growth(assemble(grid, FractionalOrder(0.5)),
                                     SemilinearTerm::capped_linear(0.1, 10.0));
  REQUIRE_FALSE(skipped.performed);
}

TEST_CASE("identical config gives bit-identical reports", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 96);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.75));
  const SingularPotential sp(2.0);
  const Vec w = omega_sin(grid);

  const SolveReport r1 = solve_weak_newton(op, sp, w);
  const SolveReport r2 = solve_weak_newton(op, sp, w);
  REQUIRE(r1.iterations == r2.iterations);
  REQUIRE(std::memcmp(r1.solution.data(), r2.solution.data(),
                      sizeof(double) * static_cast<std::size_t>(r1.solution.size())) == 0);
  REQUIRE(r1.final_residual == r2.final_residual);

  const SolveReport u0_rep = solve_u0(op, sp);
  EnergyFunctional E1(op, ShiftedPotential(sp, u0_rep.solution), w);
  EnergyFunctional E2(op, ShiftedPotential(sp, u0_rep.solution), w);
  const SolveReport m1 = minimize_j_omega(E1);
  const SolveReport m2 = minimize_j_omega(E2);
  REQUIRE(m1.iterations == m2.iterations);
  REQUIRE(std::memcmp(m1.solution.data(), m2.solution.data(),
                      sizeof(double) * static_cast<std::size_t>(m1.solution.size())) == 0);
}

TEST_CASE("config validation", "[solvers]") {
  SolveConfig cfg;
  cfg.damping = 1.5;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.tol_residual = 0.0;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.max_iter = 0;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("strongly negative data never crosses the positivity barrier", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 96);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SingularPotential sp(1.0);
  for (double c : {-2.0, -20.0}) {
    const SolveReport rep = solve_weak_newton(op, sp, omega_constant(grid, c));
    REQUIRE(rep.converged);
    REQUIRE(rep.solution.minCoeff() > 0.0);
    // the singular term dominates: stronger negative data pushes u down
    // but the discrete solution stays strictly positive
  }
}

TEST_CASE("semilinear divergence is reported, never silently fixed", "[solvers]") {
  const Grid grid = build_grid(-1.0, 1.0, 96);
  const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
  const SolveReport rep =
      solve_semilinear(op, SingularPotential(1.0), SemilinearTerm::capped_linear(5.0, 1e9));
  REQUIRE_FALSE(rep.converged);
  REQUIRE(rep.failure == SolveFailure::divergence);
  REQUIRE(rep.notes.find("diverging") != std::string::npos);
}
