#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/solvers.hpp"
#include "fraclap/verification.hpp"

namespace fraclap {

using json = nlohmann::json;

class FileError : public std::runtime_error {
 public:
  explicit FileError(const std::string& what) : std::runtime_error(what) {}
};

/// Locale-independent shortest-faithful numeric text: 17 significant
/// digits, '.' decimal point.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json grid_to_json(const Grid& g) {
  return json{{"a", g.a}, {"b", g.b}, {"n", g.n}, {"h", g.h},
              {"nodes", std::vector<double>(g.nodes.begin(), g.nodes.end())}};
}

inline json solve_report_to_json(const SolveReport& rep) {
  json j{{"path", to_string(rep.path)},
         {"converged", rep.converged},
         {"failure", to_string(rep.failure)},
         {"iterations", rep.iterations},
         {"final_residual", rep.final_residual},
         {"residual_history", rep.residual_history},
         {"outside_paper_hypotheses", rep.outside_paper_hypotheses},
         {"solution", std::vector<double>(rep.solution.data(), rep.solution.data() + rep.solution.size())}};
  if (rep.barrier_check)
    j["barrier_slack"] = std::vector<double>(rep.barrier_check->data(),
                                             rep.barrier_check->data() + rep.barrier_check->size());
  if (rep.energy_value) j["energy_value"] = *rep.energy_value;
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  return j;
}

inline json check_report_to_json(const CheckReport& c) {
  json j{{"name", c.name},
         {"passed", c.passed},
         {"worst_slack", c.worst_slack},
         {"tolerance", c.tolerance},
         {"notes", c.notes}};
  if (c.location) j["location"] = *c.location;
  if (!c.refinement_table.empty()) {
    json table = json::array();
    for (const auto& [n, v] : c.refinement_table) table.push_back(json{{"n", n}, {"metric", v}});
    j["refinement_table"] = table;
  }
  return j;
}

inline json battery_report_to_json(const BatteryReport& b) {
  json checks = json::array();
  for (const auto& c : b.checks) checks.push_back(check_report_to_json(c));
  json cfg{{"s_values", b.config.s_values},
           {"gamma_values", b.config.gamma_values},
           {"a", b.config.a},
           {"b", b.config.b},
           {"n", b.config.n},
           {"n_fine", b.config.n_fine},
           {"tol_residual", b.config.solve.tol_residual},
           {"max_iter", b.config.solve.max_iter},
           {"seed", b.config.seed}};
  return json{{"checks", checks},
              {"config", cfg},
              {"all_passed", b.all_passed},
              {"versions", json{{"fraclap", "1.0.0"}}}};
}

/// Solution profile with barrier columns, one row per interior node.
inline void write_csv_profile(std::ostream& os, const Grid& grid, const Vec& u, const Vec& u0,
                              const Vec& lower, const Vec& upper) {
  os << "x,u,u0,lower_barrier,upper_barrier\n";
  for (int i = 0; i < grid.interior(); ++i) {
    os << fmt17(grid.nodes[static_cast<std::size_t>(i)]) << ',' << fmt17(u[i]) << ','
       << fmt17(u0[i]) << ',' << fmt17(lower[i]) << ',' << fmt17(upper[i]) << '\n';
  }
}

/// Dense binary export of the pointwise operator L: header
/// {n: uint64 (grid cell count), s, a, b, c: float64}, then the
/// (n-1) x (n-1) matrix row-major as 64-bit floats.
inline void write_operator_binary(const NonlocalOperator& op, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FileError("cannot open for writing: " + path);
  const std::uint64_t n = static_cast<std::uint64_t>(op.grid.n);
  const double header[4] = {op.order.s, op.grid.a, op.grid.b, op.c};
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  const int m = op.grid.interior();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double v = op.L(i, j);
      os.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!os) throw FileError("write failed: " + path);
}

struct OperatorBinary {
  std::uint64_t n;
  double s, a, b, c;
  Mat L;
};

inline OperatorBinary read_operator_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileError("cannot open: " + path);
  OperatorBinary out;
  double header[4];
  is.read(reinterpret_cast<char*>(&out.n), sizeof(out.n));
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  out.s = header[0];
  out.a = header[1];
  out.b = header[2];
  out.c = header[3];
  const int m = static_cast<int>(out.n) - 1;
  out.L.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double v;
      is.read(reinterpret_cast<char*>(&v), sizeof(v));
      out.L(i, j) = v;
    }
  if (!is) throw FileError("truncated operator file: " + path);
  return out;
}

inline void write_operator_csv(const NonlocalOperator& op, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FileError("cannot open for writing: " + path);
  const int m = op.grid.interior();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (j) os << ',';
      os << fmt17(op.L(i, j));
    }
    os << '\n';
  }
}

/// Reads omega from a two-column CSV (x, value) sampled on exactly this
/// grid; no interpolation, mismatched abscissae are rejected.
inline Vec read_omega_csv(const std::string& path, const Grid& grid) {
  std::ifstream is(path);
  if (!is) throw FileError("cannot open: " + path);
  Vec w(grid.interior());
  std::string line;
  int row = 0;
  const double tol = 1e-9 * (grid.b - grid.a);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    // skip an optional header
    if (row == 0 && line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos) continue;
    double x, v;
    if (std::sscanf(line.c_str(), "%lf , %lf", &x, &v) != 2 &&
        std::sscanf(line.c_str(), "%lf,%lf", &x, &v) != 2)
      throw FileError("omega CSV: cannot parse line '" + line + "'");
    if (row >= grid.interior()) throw FileError("omega CSV: more rows than interior nodes");
    if (std::abs(x - grid.nodes[static_cast<std::size_t>(row)]) > tol)
      throw FileError("omega CSV: abscissa " + fmt17(x) + " does not match node " +
                      fmt17(grid.nodes[static_cast<std::size_t>(row)]) +
                      " (exact grid required, no interpolation)");
    w[row++] = v;
  }
  if (row != grid.interior()) throw FileError("omega CSV: expected one row per interior node");
  return w;
}

}  // namespace fraclap
