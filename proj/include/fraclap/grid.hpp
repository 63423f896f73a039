#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace fraclap {

/// Uniform vertex mesh of the interval (a, b).
///
/// Unknowns live at the n-1 interior nodes x_i = a + i*h only. Grid
/// functions are extended by zero on the endpoints and on all of
/// R \ (a, b): the nonlocal Dirichlet condition is a convention of the
/// discretization, not a set of ghost unknowns.
///
/// Immutable after construction; safe to share across threads.
struct Grid {
  double a = 0.0;
  double b = 1.0;
  int n = 0;         ///< number of cells; interior nodes = n - 1
  double h = 0.0;    ///< spacing (b - a) / n
  std::vector<double> nodes;          ///< interior coordinates, ascending
  std::vector<double> boundary_dist;  ///< min(x_i - a, b - x_i) per node

  int interior() const { return n - 1; }

  static Grid build(double a, double b, int n) {
    if (!(b > a)) throw std::invalid_argument("Grid: requires b > a");
    if (n < 4) throw std::invalid_argument("Grid: requires n >= 4 (operator stencils degenerate below)");
    Grid g;
    g.a = a;
    g.b = b;
    g.n = n;
    g.h = (b - a) / n;
    g.nodes.resize(static_cast<std::size_t>(n) - 1);
    g.boundary_dist.resize(g.nodes.size());
    for (int i = 1; i < n; ++i) {
      const double x = a + i * g.h;
      g.nodes[static_cast<std::size_t>(i) - 1] = x;
      g.boundary_dist[static_cast<std::size_t>(i) - 1] = std::min(x - a, b - x);
    }
    return g;
  }
};

inline Grid build_grid(double a, double b, int n) { return Grid::build(a, b, n); }

}  // namespace fraclap
