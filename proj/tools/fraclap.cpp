// fraclap: solver and verification harness for the singular nonlocal
// Dirichlet problem (-Delta)^s u = u^{-gamma} + omega on an interval.
//
// Commands: solve | torsion | u0 | verify <check|battery> | sweep.
// Exit codes: 0 success, 1 solver non-convergence, 2 usage error,
// 3 file not found, 4 failed verification assertion.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

#include "fraclap/config.hpp"
#include "fraclap/verification.hpp"

namespace {

using namespace fraclap;

int thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FRACLAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return static_cast<int>(hw);
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(cfg.out, std::ios::binary);
  if (!os) throw FileError("cannot open for writing: " + cfg.out);
  os << text;
}

void maybe_dump_operator(const RunConfig& cfg, const NonlocalOperator& op) {
  if (cfg.dump_operator.empty()) return;
  if (cfg.dump_operator.size() > 4 &&
      cfg.dump_operator.substr(cfg.dump_operator.size() - 4) == ".csv")
    write_operator_csv(op, cfg.dump_operator);
  else
    write_operator_binary(op, cfg.dump_operator);
}

int run_solve_like(const RunConfig& cfg) {
  const Grid grid = build_grid(cfg.a, cfg.b, cfg.n);
  const NonlocalOperator op = assemble(grid, FractionalOrder(cfg.s));
  maybe_dump_operator(cfg, op);
  const SolveConfig scfg = cfg.solver();

  SolveReport torsion = solve_torsion(op, scfg);
  const BarrierPair bp = barriers_from_torsion(torsion.solution, cfg.gamma);

  SolveReport main_rep;
  Vec u0_column;
  if (cfg.command == "torsion") {
    main_rep = torsion;
    u0_column = torsion.solution;
  } else if (cfg.command == "u0") {
    main_rep = solve_u0(op, SingularPotential(cfg.gamma), scfg);
    u0_column = main_rep.solution;
  } else {  // solve
    const SingularPotential sp(cfg.gamma);
    SolveReport u0_rep = solve_u0(op, sp, scfg);
    if (!u0_rep.converged) {
      std::cerr << "fraclap: u0 anchor solve did not converge (" << to_string(u0_rep.failure)
                << ")\n";
      return 1;
    }
    u0_column = u0_rep.solution;
    main_rep = solve_weak_newton(op, sp, cfg.omega.realize(grid), scfg);
  }

  if (!main_rep.converged) {
    std::cerr << "fraclap: solver did not converge (" << to_string(main_rep.failure)
              << "), final residual " << main_rep.final_residual << "\n";
    return 1;
  }
  if (main_rep.outside_paper_hypotheses)
    std::cerr << "fraclap: note: dim <= 2s, run is outside the assumed hypotheses\n";

  if (cfg.format == "json") {
    json j{{"grid", grid_to_json(grid)},
           {"config", run_config_to_json(cfg)},
           {"report", solve_report_to_json(main_rep)}};
    emit(cfg, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    write_csv_profile(os, grid, main_rep.solution, u0_column, bp.lower, bp.upper);
    emit(cfg, os.str());
  }
  return 0;
}

int run_verify(const RunConfig& cfg) {
  const std::string& target = cfg.verify_target;
  const SolveConfig scfg = cfg.solver();
  json out;

  auto finish = [&](const std::vector<CheckReport>& checks) {
    json arr = json::array();
    bool all = true;
    for (const auto& c : checks) {
      arr.push_back(check_report_to_json(c));
      all = all && c.passed;
      std::cerr << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (worst slack "
                << c.worst_slack << ")\n";
    }
    out = json{{"checks", arr}, {"config", run_config_to_json(cfg)}, {"all_passed", all},
               {"versions", json{{"fraclap", "1.0.0"}}}};
    emit(cfg, out.dump(2) + "\n");
    return all ? 0 : 4;
  };

  if (target == "battery") {
    BatteryConfig bc;
    bc.a = cfg.a;
    bc.b = cfg.b;
    bc.n = cfg.n;
    bc.solve.tol_residual = cfg.tol;
    bc.threads = thread_budget();
    bc.progress = [](const std::string& msg) { std::cerr << "battery: " << msg << "\n"; };
    BatteryReport battery = run_battery(bc);
    for (const auto& c : battery.checks)
      std::cerr << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (worst slack "
                << c.worst_slack << ")\n";
    emit(cfg, battery_report_to_json(battery).dump(2) + "\n");
    return battery.all_passed ? 0 : 4;
  }

  const Grid grid = build_grid(cfg.a, cfg.b, cfg.n);
  const FractionalOrder order(cfg.s);
  const SingularPotential sp(cfg.gamma);

  if (target == "cnorm") return finish({check_normalizing_constant({0.25, 0.5, 0.75})});
  if (target == "convergence")
    return finish({convergence_study(cfg.s, cfg.gamma, {cfg.n / 4, cfg.n / 2, cfg.n}, cfg.a, cfg.b, scfg)});
  if (target == "boundary")
    return finish({check_boundary_sense(cfg.s, cfg.gamma, {0.1},
                                        {cfg.n / 8, cfg.n / 4, cfg.n / 2, cfg.n}, cfg.a, cfg.b, scfg)});

  const NonlocalOperator op = assemble(grid, order);
  if (target == "barriers") {
    SolveReport torsion = solve_torsion(op, scfg);
    SolveReport u0_rep = solve_u0(op, sp, scfg);
    return finish({check_barriers(op, u0_rep, torsion, cfg.gamma)});
  }
  if (target == "comparison")
    return finish({check_comparison(op, sp, omega_zero(grid), cfg.omega.realize(grid), scfg)});
  if (target == "equivalence")
    return finish({check_equivalence(op, sp, cfg.omega.realize(grid), scfg)});
  if (target == "gradient")
    return finish({check_gradient(op, sp, cfg.omega.realize(grid), scfg)});
  if (target == "decomposition") {
    const SemilinearTerm term = SemilinearTerm::capped_linear(0.1, 10.0);
    SolveReport semi = solve_semilinear(op, sp, term, scfg);
    SolveReport u0_rep = solve_u0(op, sp, scfg);
    return finish({check_decomposition(op, sp, term, semi, u0_rep, scfg)});
  }
  throw UsageError("verify: unknown check '" + target +
                   "' (battery|cnorm|convergence|boundary|barriers|comparison|equivalence|gradient|decomposition)");
}

int run_sweep(const RunConfig& cfg) {
  BatteryConfig bc;
  bc.s_values = cfg.sweep_s;
  bc.gamma_values = cfg.sweep_gamma;
  bc.a = cfg.a;
  bc.b = cfg.b;
  bc.n = cfg.n;
  bc.solve.tol_residual = cfg.tol;
  bc.threads = thread_budget();
  bc.progress = [](const std::string& msg) { std::cerr << "sweep: " << msg << "\n"; };
  std::cerr << "sweep: " << bc.s_values.size() * bc.gamma_values.size() << " cells at n=" << bc.n
            << " on " << bc.threads << " thread(s)\n";
  BatteryReport battery = run_battery(bc);
  for (const auto& c : battery.checks)
    std::cerr << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "\n";
  emit(cfg, battery_report_to_json(battery).dump(2) + "\n");
  return battery.all_passed ? 0 : 4;
}

int dispatch(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.command == "verify") return run_verify(cfg);
  if (cfg.command == "sweep") return run_sweep(cfg);
  return run_solve_like(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fraclap;
  CLI::App app{"fraclap: fractional-Laplacian singular Dirichlet solver and verifier"};
  app.require_subcommand(1);

  RunConfig flags;  // receives command-line values
  std::string config_path;
  std::string omega_text;
  std::string sweep_s_text, sweep_gamma_text;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--s", flags.s, "fractional order in (0,1)");
    cmd->add_option("--gamma", flags.gamma, "singular exponent > 0");
    cmd->add_option("--a", flags.a, "left endpoint");
    cmd->add_option("--b", flags.b, "right endpoint");
    cmd->add_option("--n", flags.n, "number of cells (>= 4)");
    cmd->add_option("--omega", omega_text, "data term: zero|constant:c|sin[:amp]|bump[:amp[:c:w]]|file:path");
    cmd->add_option("--tol", flags.tol, "residual tolerance");
    cmd->add_option("--max-iter", flags.max_iter, "outer iteration budget");
    cmd->add_option("--out", flags.out, "output path (default: stdout)");
    cmd->add_option("--format", flags.format, "csv|json");
    cmd->add_option("--dump-operator", flags.dump_operator, "write the operator matrix (.bin or .csv)");
  };

  CLI::App* c_solve = app.add_subcommand("solve", "solve (-Delta)^s u = u^-gamma + omega");
  CLI::App* c_torsion = app.add_subcommand("torsion", "solve (-Delta)^s u = 1");
  CLI::App* c_u0 = app.add_subcommand("u0", "solve the pure singular problem (omega = 0)");
  CLI::App* c_verify = app.add_subcommand("verify", "run one theorem check or the whole battery");
  CLI::App* c_sweep = app.add_subcommand("sweep", "battery over lists of s and gamma");
  for (CLI::App* cmd : {c_solve, c_torsion, c_u0, c_verify, c_sweep}) add_common(cmd);
  c_verify->add_option("target", flags.verify_target, "battery or a check name");
  c_sweep->add_option("--s-list", sweep_s_text, "comma-separated s values");
  c_sweep->add_option("--gamma-list", sweep_gamma_text, "comma-separated gamma values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* cmd = app.get_subcommands().front();

  try {
    RunConfig cfg;  // defaults
    if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
    cfg.command = cmd->get_name();
    // flags win over the config file
    auto take = [&](const char* name, auto RunConfig::* field) {
      if (cmd->count(name)) cfg.*field = flags.*field;
    };
    take("--s", &RunConfig::s);
    take("--gamma", &RunConfig::gamma);
    take("--a", &RunConfig::a);
    take("--b", &RunConfig::b);
    take("--n", &RunConfig::n);
    take("--tol", &RunConfig::tol);
    take("--max-iter", &RunConfig::max_iter);
    take("--out", &RunConfig::out);
    take("--format", &RunConfig::format);
    take("--dump-operator", &RunConfig::dump_operator);
    if (cmd->count("--omega")) cfg.omega = OmegaSpec::parse(omega_text);
    if (cmd->get_name() == "verify" && cmd->count("target"))
      cfg.verify_target = flags.verify_target;
    auto parse_list = [](const std::string& text) {
      std::vector<double> out;
      std::size_t start = 0;
      while (start < text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stod(text.substr(start, comma - start)));
        start = comma + 1;
      }
      return out;
    };
    if (cmd->get_name() == "sweep") {
      if (cmd->count("--s-list")) cfg.sweep_s = parse_list(sweep_s_text);
      if (cmd->count("--gamma-list")) cfg.sweep_gamma = parse_list(sweep_gamma_text);
    }

    return dispatch(cfg);
  } catch (const UsageError& e) {
    std::cerr << "fraclap: " << e.what() << "\n";
    return 2;
  } catch (const FileError& e) {
    std::cerr << "fraclap: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "fraclap: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fraclap: error: " << e.what() << "\n";
    return 1;
  }
}
