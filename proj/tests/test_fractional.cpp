#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fraclap/fractional.hpp"

using namespace fraclap;

TEST_CASE("order validation and embedding flag", "[fractional]") {
  REQUIRE_THROWS_AS(FractionalOrder(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(FractionalOrder(1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(FractionalOrder(-0.2), std::invalid_argument);
  REQUIRE_THROWS_AS(FractionalOrder(1.7), std::invalid_argument);

  REQUIRE(FractionalOrder(0.25, 1).sobolev_embedding_valid());
  REQUIRE_FALSE(FractionalOrder(0.5, 1).sobolev_embedding_valid());
  REQUIRE_FALSE(FractionalOrder(0.75, 1).sobolev_embedding_valid());
  REQUIRE(FractionalOrder(0.75, 2).sobolev_embedding_valid());

  REQUIRE(FractionalOrder(0.25, 1).critical_exponent() == Catch::Approx(4.0));
  REQUIRE_THROWS_AS(FractionalOrder(0.5, 1).critical_exponent(), std::domain_error);
}

TEST_CASE("c_{1,1/2} equals 1/pi", "[fractional]") {
  const double c = normalizing_constant(FractionalOrder(0.5, 1));
  REQUIRE(std::abs(c - 1.0 / M_PI) <= 1e-10);
}

TEST_CASE("gamma formula agrees with the defining integral", "[fractional]") {
  for (int dim : {1, 2}) {
    for (double s : {0.25, 0.5, 0.75}) {
      const FractionalOrder order(s, dim);
      const double cg = normalizing_constant(order);
      const double cq = normalizing_constant_integral(order);
      INFO("N=" << dim << " s=" << s);
      REQUIRE(std::abs(cg - cq) / cg <= 1e-8);
    }
  }
}

TEST_CASE("c tends to zero as s -> 0+", "[fractional]") {
  double prev = normalizing_constant(FractionalOrder(0.2, 1));
  for (double s : {0.1, 0.01, 1e-3, 1e-6}) {
    const double c = normalizing_constant(FractionalOrder(s, 1));
    REQUIRE(c > 0.0);
    REQUIRE(c < prev);
    prev = c;
  }
  REQUIRE(prev < 1e-5);
}

TEST_CASE("integral cross-check rejects unsupported dimension", "[fractional]") {
  REQUIRE_THROWS_AS(normalizing_constant_integral(FractionalOrder(0.5, 3)), std::domain_error);
}
