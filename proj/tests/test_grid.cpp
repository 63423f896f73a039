#include <catch2/catch_amalgamated.hpp>

#include "fraclap/grid.hpp"
#include "fraclap/io.hpp"

using namespace fraclap;

TEST_CASE("grid nodes and spacing", "[grid]") {
  const Grid g = build_grid(-1.0, 1.0, 4);
  REQUIRE(g.h == Catch::Approx(0.5));
  REQUIRE(g.interior() == 3);
  REQUIRE(g.nodes[0] == Catch::Approx(-0.5));
  REQUIRE(g.nodes[1] == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(g.nodes[2] == Catch::Approx(0.5));

  const Grid g2 = build_grid(0.0, 1.0, 4);
  REQUIRE(g2.nodes[0] == Catch::Approx(0.25));
  REQUIRE(g2.nodes[1] == Catch::Approx(0.5));
  REQUIRE(g2.nodes[2] == Catch::Approx(0.75));
}

TEST_CASE("boundary distances", "[grid]") {
  const Grid g = build_grid(-1.0, 1.0, 8);
  // node at x = -0.75 is the first interior node
  REQUIRE(g.nodes[0] == Catch::Approx(-0.75));
  REQUIRE(g.boundary_dist[0] == Catch::Approx(0.25));
  for (std::size_t i = 0; i < g.boundary_dist.size(); ++i) {
    REQUIRE(g.boundary_dist[i] > 0.0);
    REQUIRE(g.boundary_dist[i] <= (g.b - g.a) / 2.0 + 1e-15);
  }
}

TEST_CASE("grid rejects degenerate input", "[grid]") {
  REQUIRE_THROWS_AS(build_grid(-1.0, 1.0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(build_grid(1.0, 1.0, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(build_grid(2.0, 1.0, 8), std::invalid_argument);
}

TEST_CASE("spacing uniform to roundoff and quadrature weights consistent", "[grid]") {
  for (int n : {4, 7, 64, 1000}) {
    const Grid g = build_grid(-2.5, 3.0, n);
    for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i)
      REQUIRE(std::abs(g.nodes[i + 1] - g.nodes[i] - g.h) <=
              4.0 * std::numeric_limits<double>::epsilon() * std::abs(g.b - g.a));
    for (double x : g.nodes) {
      REQUIRE(x > g.a);
      REQUIRE(x < g.b);
    }
    // sum of the midpoint weights h over interior nodes
    REQUIRE(g.h * g.interior() ==
            Catch::Approx((g.b - g.a) * (n - 1) / static_cast<double>(n)).epsilon(1e-13));
  }
}

TEST_CASE("refinement nests nodes", "[grid]") {
  const Grid coarse = build_grid(-1.0, 1.0, 32);
  const Grid fine = build_grid(-1.0, 1.0, 64);
  for (int i = 1; i < coarse.n; ++i)
    REQUIRE(coarse.nodes[static_cast<std::size_t>(i - 1)] ==
            Catch::Approx(fine.nodes[static_cast<std::size_t>(2 * i - 1)]).margin(1e-14));
}

TEST_CASE("grid serializes to JSON", "[grid]") {
  const Grid g = build_grid(0.0, 2.0, 8);
  const json j = grid_to_json(g);
  REQUIRE(j.at("a").get<double>() == 0.0);
  REQUIRE(j.at("b").get<double>() == 2.0);
  REQUIRE(j.at("n").get<int>() == 8);
  REQUIRE(j.at("h").get<double>() == Catch::Approx(0.25));
  REQUIRE(j.at("nodes").size() == 7);
  REQUIRE(j.at("nodes")[0].get<double>() == Catch::Approx(0.25));
}
