// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <vector>

#include "fraclap/io.hpp"
#include "fraclap/verification.hpp"

using namespace fraclap;

namespace {

int g_failures = 0;

void report(int number, const std::string& what, bool passed, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s  (%s)\n", passed ? "PASS" : "FAIL", number, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

struct CellData {
  Grid grid;
  NonlocalOperator op;
  SolveReport torsion;
  std::map<double, SolveReport> u0;  // by gamma
};

}  // namespace

int main() {
  const std::vector<double> s_values = {0.25, 0.5, 0.75};
  const std::vector<double> gamma_values = {0.5, 1.0, 2.0, 4.0};
  const SolveConfig cfg = [] {
    SolveConfig c;
    c.max_iter = 1000;
    return c;
  }();

  // shared per-s data at the battery resolution
  std::map<double, CellData> cells;
  for (double s : s_values) {
    Grid grid = build_grid(-1.0, 1.0, 512);
    NonlocalOperator op = assemble(grid, FractionalOrder(s));
    SolveReport tor = solve_torsion(op, cfg);
    CellData cell{std::move(grid), std::move(op), std::move(tor), {}};
    for (double g : gamma_values) cell.u0.emplace(g, solve_u0(cell.op, SingularPotential(g), cfg));
    cells.emplace(s, std::move(cell));
  }

  // 1. torsion oracle: s = 1/2, interior sup error at n = 1024 below 1e-2,
  //    monotone over {256, 512, 1024}, within the runtime budget
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> errors;
    for (int n : {256, 512, 1024}) {
      const Grid grid = build_grid(-1.0, 1.0, n);
      const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
      const SolveReport tor = solve_torsion(op, cfg);
      const Vec exact = torsion_exact(grid, 0.5);
      double err = 0.0;
      for (int i = 0; i < grid.interior(); ++i)
        if (std::abs(grid.nodes[static_cast<std::size_t>(i)]) <= 0.5)
          err = std::max(err, std::abs(tor.solution[i] - exact[i]));
      errors.push_back(err);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool monotone = errors[1] < errors[0] && errors[2] < errors[1];
    const bool passed = errors[2] <= 1e-2 && monotone && seconds <= 60.0;
    report(1, "torsion oracle, sup error on |x|<=1/2", passed,
           "errors " + fmt(errors[0]) + " > " + fmt(errors[1]) + " > " + fmt(errors[2]) +
               ", wall " + fmt(seconds) + " s");
  }

  // 2. normalizing constant: Gamma formula vs quadrature to 1e-8 on
  //    {1,2} x {0.25, 0.5, 0.75}; c_{1,1/2} = 1/pi to 1e-10
  {
    double worst = 0.0;
    for (int dim : {1, 2})
      for (double s : s_values) {
        const FractionalOrder order(s, dim);
        worst = std::max(worst, std::abs(normalizing_constant(order) -
                                         normalizing_constant_integral(order)) /
                                    normalizing_constant(order));
      }
    const double pin = std::abs(normalizing_constant(FractionalOrder(0.5, 1)) - 1.0 / M_PI);
    report(2, "normalizing constant formula vs quadrature", worst <= 1e-8 && pin <= 1e-10,
           "worst rel " + fmt(worst) + ", |c_{1,1/2} - 1/pi| = " + fmt(pin));
  }

  // 3. barrier sandwich at every matrix cell: violations <= 5e-3 at n=512,
  //    not growing at n=1024
  {
    bool passed = true;
    double worst = 0.0;
    std::string worst_at = "-";
    for (double s : s_values) {
      const Grid fine_grid = build_grid(-1.0, 1.0, 1024);
      const NonlocalOperator fine_op = assemble(fine_grid, FractionalOrder(s));
      const SolveReport fine_tor = solve_torsion(fine_op, cfg);
      for (double g : gamma_values) {
        const CellData& cell = cells.at(s);
        const CheckReport coarse = check_barriers(cell.op, cell.u0.at(g), cell.torsion, g);
        const SolveReport fine_u0 = solve_u0(fine_op, SingularPotential(g), cfg);
        const CheckReport fine = check_barriers(fine_op, fine_u0, fine_tor, g);
        const bool cell_ok = coarse.passed && fine.worst_slack <= std::max(coarse.worst_slack, 0.0) + 1e-15;
        if (coarse.worst_slack >= worst) {
          worst = coarse.worst_slack;
          worst_at = detail::cell_tag(s, g);
        }
        passed = passed && cell_ok;
      }
    }
    report(3, "barrier sandwich over the (s,gamma) matrix", passed,
           "worst violation " + fmt(worst) + " at " + worst_at);
  }

  // 4 & 5. formulation equivalence and the variational inequality at every
  //        cell for omega in {0, 1, sin, bump}
  {
    bool eq_passed = true, vi_passed = true, zero_anchor = true;
    double worst_eq = 0.0, worst_vi = 0.0;
    for (double s : s_values) {
      const CellData& cell = cells.at(s);
      const Vec omegas[4] = {omega_zero(cell.grid), omega_constant(cell.grid, 1.0),
                             omega_sin(cell.grid), omega_bump(cell.grid)};
      for (double g : gamma_values) {
        const SingularPotential sp(g);
        for (int k = 0; k < 4; ++k) {
          const CheckReport eq = check_equivalence(cell.op, sp, omegas[k], cfg, 100,
                                                   20240915 + 17 * k);
          eq_passed = eq_passed && eq.passed;
          worst_eq = std::max(worst_eq, eq.worst_slack);
          // the VI slack sits inside the same check; a failed VI fails it
          const std::size_t pos = eq.notes.find("worst VI slack ");
          if (pos != std::string::npos) {
            const double slack = std::atof(eq.notes.c_str() + pos + 15);
            worst_vi = std::min(worst_vi, slack);
            vi_passed = vi_passed && slack >= -1e-9;
          }
        }
        // omega = 0: the anchor is the minimizer and J(u0) = 0 exactly
        EnergyFunctional E(cell.op, ShiftedPotential(sp, cell.u0.at(g).solution),
                           omega_zero(cell.grid));
        if (j_omega(E, Vec::Zero(cell.grid.interior())) != 0.0) zero_anchor = false;
        const SolveReport mini = minimize_j_omega(E, cfg);
        if ((mini.solution - cell.u0.at(g).solution).cwiseAbs().maxCoeff() > 1e-6)
          zero_anchor = false;
      }
    }
    report(4, "weak-Newton vs variational minimizer agreement", eq_passed && zero_anchor,
           "worst path difference " + fmt(worst_eq) + ", anchor displacement within 1e-6");
    report(5, "variational inequality on random competitors", vi_passed,
           "worst slack " + fmt(worst_vi) + " >= -1e-9");
  }

  // 6. comparison across the matrix
  {
    bool passed = true;
    double worst = 0.0;
    for (double s : s_values) {
      const CellData& cell = cells.at(s);
      for (double g : gamma_values) {
        const SingularPotential sp(g);
        for (const auto& [lo, hi] :
             {std::pair<Vec, Vec>{omega_zero(cell.grid), omega_constant(cell.grid, 1.0)},
              std::pair<Vec, Vec>{omega_zero(cell.grid), omega_bump(cell.grid)}}) {
          const CheckReport rep = check_comparison(cell.op, sp, lo, hi, cfg);
          passed = passed && rep.passed;
          worst = std::max(worst, rep.worst_slack);
        }
      }
    }
    report(6, "monotone data gives monotone solutions", passed,
           "worst violation " + fmt(worst) + " <= 1e-9");
  }

  // 7. decomposition for g = 0.1 min(t, 10)
  {
    const CellData& cell = cells.at(0.5);
    const SingularPotential sp(1.0);
    const SemilinearTerm term = SemilinearTerm::capped_linear(0.1, 10.0);
    const SolveReport semi = solve_semilinear(cell.op, sp, term, cfg);
    const CheckReport rep =
        check_decomposition(cell.op, sp, term, semi, cell.u0.at(1.0), cfg);
    report(7, "semilinear decomposition u = u0 + w", semi.converged && rep.passed,
           "F prox residual and frozen re-solve diff <= " + fmt(rep.worst_slack));
  }

  // 8. boundary sense: gamma = 4, s = 1/2, eps = 0.1 across n in {128..1024}
  {
    std::vector<double> seminorms;
    for (int n : {128, 256, 512, 1024}) {
      const Grid grid = build_grid(-1.0, 1.0, n);
      const NonlocalOperator op = assemble(grid, FractionalOrder(0.5));
      const SolveReport u0_rep = solve_u0(op, SingularPotential(4.0), cfg);
      Vec trunc = (u0_rep.solution.array() - 0.1).cwiseMax(0.0).matrix();
      seminorms.push_back(gagliardo_seminorm(op, trunc));
    }
    double lo = seminorms[0], hi = seminorms[0];
    for (double v : seminorms) lo = std::min(lo, v), hi = std::max(hi, v);
    const bool passed = hi / lo <= 1.05;
    report(8, "seminorm of (u-0.1)^+ varies by <= 5% across refinements", passed,
           "spread " + fmt(hi / lo - 1.0));
  }

  // 9. analytic vs finite-difference gradient, 100 points per cell
  {
    bool passed = true;
    double worst = 0.0;
    for (double s : s_values) {
      const CellData& cell = cells.at(s);
      for (double g : gamma_values) {
        const CheckReport rep =
            check_gradient(cell.op, SingularPotential(g), omega_sin(cell.grid), cfg, 100);
        passed = passed && rep.passed;
        worst = std::max(worst, rep.worst_slack);
      }
    }
    report(9, "gradient of J_omega vs central differences", passed,
           "worst relative error " + fmt(worst) + " <= 1e-6");
  }

  // 10. determinism: two identical battery invocations produce identical bytes
  {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fraclap_acceptance";
    fs::create_directories(dir);
    const fs::path o1 = dir / "battery1.json", o2 = dir / "battery2.json";
    const std::string base = std::string(FRACLAP_CLI_PATH) +
                             " verify battery 2>/dev/null > ";
    const int r1 = std::system((base + o1.string()).c_str());
    const int r2 = std::system((base + o2.string()).c_str());
    auto slurp = [](const fs::path& p) {
      std::ifstream is(p, std::ios::binary);
      return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    };
    const std::string b1 = slurp(o1), b2 = slurp(o2);
    const bool passed = WEXITSTATUS(r1) == 0 && WEXITSTATUS(r2) == 0 && !b1.empty() && b1 == b2;
    report(10, "verify battery is byte-identical across runs", passed,
           "bytes " + std::to_string(b1.size()) + " vs " + std::to_string(b2.size()) +
               ", exit " + std::to_string(WEXITSTATUS(r1)) + "/" + std::to_string(WEXITSTATUS(r2)));
    fs::remove_all(dir);
  }

  std::printf("%s: %d/10 criteria passed\n", g_failures ? "FAILURE" : "SUCCESS", 10 - g_failures);
  return g_failures ? 1 : 0;
}
