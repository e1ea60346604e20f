#include <doctest.h>

#include <cmath>

#include "heatframe/errors.hpp"
#include "heatframe/polynomials.hpp"
#include "oracles.hpp"

using namespace heatframe;

TEST_CASE("weight mass matches direct integration") {
  CHECK(jacobi_weight_mass({0.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(jacobi_weight_mass({-0.5, -0.5}) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  for (auto [g, a] : {std::pair{0.5, -0.3}, {1.0, 2.0}, {2.5, 0.0}, {-0.5, 1.5}}) {
    const double ref = oracle::jacobi_integral(g, a, [](double) { return 1.0; });
    CHECK(jacobi_weight_mass({g, a}) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("parameters must exceed -1") {
  CHECK_THROWS_AS(JacobiParams({-1.0, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(gauss_jacobi({0.0, -1.5}, 4), DomainError);
  CHECK_THROWS_AS(gauss_jacobi({0.0, 0.0}, 0), DomainError);
}

TEST_CASE("two point Gauss-Legendre rule") {
  const auto rule = gauss_jacobi({0.0, 0.0}, 2);
  REQUIRE(rule.nodes.size() == 2);
  CHECK(rule.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(rule.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(rule.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rule.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Gauss-Jacobi rule integrates polynomials up to degree 2n-1") {
  for (auto [g, a] : {std::pair{0.5, -0.3}, {0.0, 0.0}, {2.0, 1.0}}) {
    const std::size_t n = 12;
    const auto rule = gauss_jacobi({g, a}, n);
    for (int m : {0, 1, 5, 14, 23}) {
      double q = 0.0;
      for (std::size_t j = 0; j < n; ++j) q += rule.weights[j] * std::pow(rule.nodes[j], m);
      const double ref = oracle::jacobi_integral(g, a, [m](double x) { return std::pow(x, m); });
      CHECK(q == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("nodes ascend inside (-1, 1) with positive weights") {
  const auto rule = gauss_jacobi({-0.5, 0.7}, 200);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    CHECK(rule.weights[j] > 0.0);
    CHECK(std::abs(rule.nodes[j]) < 1.0);
    if (j > 0) CHECK(rule.nodes[j] > rule.nodes[j - 1]);
  }
}

TEST_CASE("orthonormal values for Legendre") {
  const double x = 0.3;
  const auto p = orthonormal_values({0.0, 0.0}, 3, x);
  CHECK(p[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(x * std::sqrt(1.5)).epsilon(1e-15));
  CHECK(p[2] == doctest::Approx(std::sqrt(2.5) * 0.5 * (3 * x * x - 1)).epsilon(1e-14));
}

TEST_CASE("derivatives agree with finite differences") {
  const JacobiParams params{0.5, -0.3};
  const double x = 0.2, h = 1e-6;
  const auto vd = orthonormal_values_and_derivatives(params, 8, x);
  const auto plus = orthonormal_values(params, 8, x + h);
  const auto minus = orthonormal_values(params, 8, x - h);
  for (std::size_t i = 0; i <= 8; ++i) {
    CHECK(vd.derivatives[i] == doctest::Approx((plus[i] - minus[i]) / (2 * h)).epsilon(1e-7));
  }
}
