#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fraclap/io.hpp"

namespace fraclap {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Tagged source of the data term omega.
struct OmegaSpec {
  enum class Kind { zero, constant, sin, bump, file };
  Kind kind = Kind::zero;
  double value = 1.0;  ///< constant c, or profile amplitude
  std::optional<double> center, width;  ///< bump parameters
  std::string path;    ///< CSV source

  static OmegaSpec parse(const std::string& text);
  std::string to_string() const;
  Vec realize(const Grid& grid) const {
    switch (kind) {
      case Kind::zero: return omega_zero(grid);
      case Kind::constant: return omega_constant(grid, value);
      case Kind::sin: return omega_sin(grid, value);
      case Kind::bump:
        return omega_bump(grid, value,
                          center ? *center : std::numeric_limits<double>::quiet_NaN(),
                          width ? *width : 0.0);
      case Kind::file: return read_omega_csv(path, grid);
    }
    throw UsageError("omega: unknown kind");
  }
};

inline OmegaSpec OmegaSpec::parse(const std::string& text) {
  OmegaSpec spec;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t colon = s.find(':', start);
      if (colon == std::string::npos) {
        parts.push_back(s.substr(start));
        break;
      }
      parts.push_back(s.substr(start, colon - start));
      start = colon + 1;
    }
    return parts;
  };
  const auto parts = split(text);
  const std::string& kind = parts[0];
  auto num = [&](std::size_t i) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(parts.at(i), &pos);
      if (pos != parts.at(i).size()) throw std::invalid_argument(parts.at(i));
      return v;
    } catch (const std::exception&) {
      throw UsageError("omega: bad numeric parameter '" + parts.at(i) + "' in '" + text + "'");
    }
  };
  if (kind == "zero") {
    if (parts.size() > 1) throw UsageError("omega: 'zero' takes no parameters");
    spec.kind = Kind::zero;
  } else if (kind == "constant") {
    if (parts.size() != 2) throw UsageError("omega: expected constant:<value>");
    spec.kind = Kind::constant;
    spec.value = num(1);
  } else if (kind == "sin") {
    spec.kind = Kind::sin;
    spec.value = parts.size() > 1 ? num(1) : 1.0;
    if (parts.size() > 2) throw UsageError("omega: sin takes at most one parameter (amplitude)");
  } else if (kind == "bump") {
    spec.kind = Kind::bump;
    spec.value = parts.size() > 1 ? num(1) : 1.0;
    if (parts.size() == 4) {
      spec.center = num(2);
      spec.width = num(3);
    } else if (parts.size() > 2) {
      throw UsageError("omega: expected bump[:amplitude[:center:width]]");
    }
  } else if (kind == "file") {
    if (parts.size() != 2 || parts[1].empty()) throw UsageError("omega: expected file:<path>");
    spec.kind = Kind::file;
    spec.path = parts[1];
  } else {
    throw UsageError("omega: unknown kind '" + kind + "' (zero|constant|sin|bump|file)");
  }
  return spec;
}

inline std::string OmegaSpec::to_string() const {
  switch (kind) {
    case Kind::zero: return "zero";
    case Kind::constant: return "constant:" + fmt17(value);
    case Kind::sin: return "sin:" + fmt17(value);
    case Kind::bump:
      if (center && width)
        return "bump:" + fmt17(value) + ":" + fmt17(*center) + ":" + fmt17(*width);
      return "bump:" + fmt17(value);
    case Kind::file: return "file:" + path;
  }
  return "?";
}

/// One batch invocation: command, problem parameters, data source, solver
/// overrides and output destination. Parsed config re-serializes to an
/// equivalent document; unknown keys are hard errors.
struct RunConfig {
  std::string command = "solve";  // solve | torsion | u0 | verify | sweep
  double s = 0.5;
  double gamma = 1.0;
  double a = -1.0;
  double b = 1.0;
  int n = 512;
  OmegaSpec omega;
  double tol = 1e-10;
  int max_iter = 500;
  std::string out;              ///< output path; empty = stdout
  std::string format = "csv";   // csv | json
  std::string verify_target = "battery";
  std::vector<double> sweep_s = {0.25, 0.5, 0.75};
  std::vector<double> sweep_gamma = {0.5, 1.0, 2.0, 4.0};
  std::string dump_operator;    ///< optional path (.bin or .csv)

  void validate() const {
    static const std::set<std::string> commands{"solve", "torsion", "u0", "verify", "sweep"};
    if (!commands.count(command)) throw UsageError("command: unknown '" + command + "'");
    if (!(s > 0.0 && s < 1.0)) throw UsageError("s: must lie in (0,1)");
    if (!(gamma > 0.0)) throw UsageError("gamma: must be > 0");
    if (!(b > a)) throw UsageError("a,b: requires b > a");
    if (n < 4) throw UsageError("n: must be >= 4");
    if (!(tol > 0.0)) throw UsageError("tol: must be > 0");
    if (max_iter < 1) throw UsageError("max-iter: must be >= 1");
    if (format != "csv" && format != "json") throw UsageError("format: must be csv or json");
    for (double sv : sweep_s)
      if (!(sv > 0.0 && sv < 1.0)) throw UsageError("sweep s list: values must lie in (0,1)");
    for (double gv : sweep_gamma)
      if (!(gv > 0.0)) throw UsageError("sweep gamma list: values must be > 0");
  }

  SolveConfig solver() const {
    SolveConfig cfg;
    cfg.tol_residual = tol;
    cfg.max_iter = max_iter;
    return cfg;
  }
};

inline json run_config_to_json(const RunConfig& c) {
  json j{{"command", c.command}, {"s", c.s},     {"gamma", c.gamma},
         {"a", c.a},             {"b", c.b},     {"n", c.n},
         {"omega", c.omega.to_string()},         {"tol", c.tol},
         {"max_iter", c.max_iter},               {"out", c.out},
         {"format", c.format},   {"verify_target", c.verify_target},
         {"sweep_s", c.sweep_s}, {"sweep_gamma", c.sweep_gamma},
         {"dump_operator", c.dump_operator}};
  return j;
}

/// Applies a config-file document on top of defaults. Field names mirror
/// the JSON emitted by run_config_to_json; any unknown key is an error.
inline RunConfig run_config_from_json(const json& j, RunConfig base = {}) {
  static const std::set<std::string> known{
      "command", "s", "gamma", "a", "b", "n", "omega", "tol", "max_iter",
      "out", "format", "verify_target", "sweep_s", "sweep_gamma", "dump_operator"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw UsageError("config: unknown key '" + item.key() + "'");
  auto get = [&j](const char* key, auto& into) {
    if (j.contains(key)) into = j.at(key).get<std::decay_t<decltype(into)>>();
  };
  get("command", base.command);
  get("s", base.s);
  get("gamma", base.gamma);
  get("a", base.a);
  get("b", base.b);
  get("n", base.n);
  if (j.contains("omega")) base.omega = OmegaSpec::parse(j.at("omega").get<std::string>());
  get("tol", base.tol);
  get("max_iter", base.max_iter);
  get("out", base.out);
  get("format", base.format);
  get("verify_target", base.verify_target);
  get("sweep_s", base.sweep_s);
  get("sweep_gamma", base.sweep_gamma);
  get("dump_operator", base.dump_operator);
  return base;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw FileError("config file not found: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config file: invalid JSON: ") + e.what());
  }
  return run_config_from_json(j, base);
}

}  // namespace fraclap
