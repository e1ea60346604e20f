#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "heatframe/errors.hpp"
#include "heatframe/geometry.hpp"
#include "heatframe/sampling.hpp"
#include "oracles.hpp"

using namespace heatframe;

namespace {

double max_weight(const MetricMeasureSpace& s) {
  return *std::max_element(s.weights().begin(), s.weights().end());
}

MetricMeasureSpace uniform_grid(std::size_t n) {
  std::vector<double> pts(n), w(n, 1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) pts[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return MetricMeasureSpace::euclidean(pts, w);
}

}  // namespace

TEST_CASE("Jacobi space total mass") {
  CHECK(make_jacobi_space(0, 0, 64).total_mass() == doctest::Approx(2.0).epsilon(1e-12));
  const double ref = oracle::jacobi_integral(-0.5, -0.5, [](double) { return 1.0; });
  CHECK(std::abs(make_jacobi_space(-0.5, -0.5, 64).total_mass() - ref) <= 1e-10);
}

TEST_CASE("two node Legendre space") {
  const auto s = make_jacobi_space(0, 0, 2);
  CHECK(s.point(0) == doctest::Approx(-1 / std::sqrt(3.0)));
  CHECK(s.point(1) == doctest::Approx(1 / std::sqrt(3.0)));
  CHECK(s.weight(0) == doctest::Approx(1.0));
  CHECK(s.weight(1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_jacobi_space(0, 0, 1), DomainError);
  CHECK_THROWS_AS(make_jacobi_space(-1.2, 0, 8), DomainError);
}

TEST_CASE("arccos metric and diameter") {
  const auto s = make_jacobi_space(0.5, -0.3, 40);
  CHECK(s.metric_kind() == MetricKind::arccos);
  CHECK(s.diameter() == doctest::Approx(std::numbers::pi));
  for (std::size_t i = 0; i < 40; i += 7) {
    for (std::size_t j = 0; j < 40; j += 5) {
      CHECK(s.distance(i, j) ==
            doctest::Approx(std::abs(std::acos(s.point(i)) - std::acos(s.point(j)))).epsilon(1e-14));
    }
  }
}

TEST_CASE("ball volumes on the Legendre space") {
  const auto s = make_jacobi_space(0, 0, 65);
  const std::size_t c = s.nearest_index(0.0);
  CHECK(ball_volume(s, c, std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ball_volume(s, c, 0.0) == 0.0);
  // Exact value: length of (-sqrt2/2, sqrt2/2).
  CHECK(std::abs(ball_volume(s, c, std::numbers::pi / 4) - std::sqrt(2.0)) <= max_weight(s));
}

TEST_CASE("ball volume is monotone and saturates") {
  const auto s = make_jacobi_space(0.5, -0.3, 48);
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t c = uniform_index(rng, s.size());
    double prev = 0.0;
    for (double r = 0.0; r <= 3.3; r += 0.05) {
      const double v = ball_volume(s, c, r);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(ball_volume(s, c, s.diameter() + 1e-9) == doctest::Approx(s.total_mass()).epsilon(1e-12));
  }
}

TEST_CASE("mean value") {
  const auto s = make_jacobi_space(0, 0, 65);
  const std::size_t c = s.nearest_index(0.0);
  std::vector<double> ones(s.size(), 3.5), x(s.size()), x2(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    x[i] = s.point(i);
    x2[i] = x[i] * x[i];
  }
  CHECK(mean_value(s, ones, c, 0.7) == doctest::Approx(3.5));
  CHECK(std::abs(mean_value(s, x, c, std::numbers::pi / 2)) < 1e-14);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(std::acos(s.point(i)) - std::numbers::pi / 2) < std::numbers::pi / 4) {
      num += s.weight(i) * x2[i];
      den += s.weight(i);
    }
  }
  CHECK(mean_value(s, x2, c, std::numbers::pi / 4) == doctest::Approx(num / den).epsilon(1e-14));
  CHECK_THROWS_AS(mean_value(s, x2, c, 0.0), DegenerateBallError);
}

TEST_CASE("mean of constant one is one on every nonempty ball") {
  const auto s = make_jacobi_space(1.0, 0.5, 30);
  std::vector<double> ones(s.size(), 1.0);
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = uniform_index(rng, s.size());
    CHECK(mean_value(s, ones, c, uniform(rng, 1e-3, 3.0)) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("doubling exponent of a uniform grid is about one") {
  const auto s = uniform_grid(401);
  std::vector<std::size_t> centers;
  for (std::size_t i = 150; i <= 250; i += 10) centers.push_back(i);
  const std::vector<double> radii{0.02, 0.03, 0.05, 0.08, 0.1};
  const auto p = estimate_doubling(s, centers, radii);
  CHECK(std::abs(p.k_hat - 1.0) <= 0.2);
  CHECK(p.k_hat >= p.alpha_hat);
  CHECK(p.alpha_hat >= 0.0);
}

TEST_CASE("radii beyond the diameter contribute ratio one") {
  const auto s = uniform_grid(21);
  const std::vector<std::size_t> centers{0, 5, 20};
  const std::vector<double> radii{2.0, 3.0};
  CHECK(estimate_doubling(s, centers, radii).k_hat == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("exact profile bounds every doubling ratio") {
  const auto s = make_jacobi_space(0.5, -0.3, 40);
  const auto p = exact_doubling_profile(s);
  CHECK(p.a_caret == std::exp2(-p.k_hat) * p.a_noncollapse);
  CHECK(p.k() == static_cast<int>(std::ceil(p.k_hat - 1e-12)));
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t c = uniform_index(rng, s.size());
    const double r = uniform(rng, 1e-3, 3.2);
    const double v = ball_volume(s, c, r);
    if (v > 0.0) CHECK(ball_volume(s, c, 2 * r) <= std::exp2(p.k_hat) * v * (1 + 1e-12));
  }
}

TEST_CASE("reverse doubling on the Legendre space") {
  const auto s = make_jacobi_space(0, 0, 64);
  const auto p = exact_doubling_profile(s);
  Rng rng(4);
  std::vector<GrowthSample> samples(80);
  for (auto& g : samples) {
    g.s1 = uniform_index(rng, s.size());
    g.r = uniform(rng, s.resolution(), s.diameter() / 3);
  }
  const auto reports = verify_reverse_doubling(s, p, samples);
  CHECK_FALSE(reports.empty());
  for (const auto& r : reports) {
    CHECK(r.passed);
    CHECK(r.paper_constant == doctest::Approx(1 + std::pow(10.0, -p.k_hat)));
  }
}

TEST_CASE("ball growth inequalities") {
  const auto s = make_jacobi_space(0, 0, 64);
  const auto p = exact_doubling_profile(s);
  SUBCASE("beta one and equal centers") {
    const std::vector<GrowthSample> samples{{3, 3, 0.4, 1.0}};
    for (const auto& r : verify_ball_growth(s, p, samples)) CHECK(r.passed);
  }
  SUBCASE("random samples") {
    Rng rng(8);
    std::vector<GrowthSample> samples(100);
    for (auto& g : samples) {
      g = {uniform_index(rng, 64), uniform_index(rng, 64), uniform(rng, s.resolution(), 3.0),
           uniform(rng, 1.0, 5.0)};
    }
    const auto reports = verify_ball_growth(s, p, samples);
    std::size_t j = 0, k = 0;
    for (const auto& r : reports) {
      CHECK(r.passed);
      j += r.check_id == "growth.J";
      k += r.check_id == "growth.K";
    }
    CHECK(j == 100);
    CHECK(k == 100);
  }
}

TEST_CASE("metric axioms hold on sampled triples") {
  const auto s = make_jacobi_space(0.5, -0.3, 50);
  Rng rng(9);
  std::vector<std::array<std::size_t, 3>> triples(200);
  for (auto& t : triples) {
    for (auto& i : t) i = uniform_index(rng, s.size());
  }
  for (const auto& r : verify_metric_axioms(s, triples)) CHECK(r.passed);
}

TEST_CASE("custom metric table and bad inputs") {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  const auto s = MetricMeasureSpace::custom({0, 1, 2}, {1, 1, 1}, d);
  CHECK(s.diameter() == 2.0);
  CHECK(s.distance(0, 2) == 2.0);
  CHECK_THROWS_AS(MetricMeasureSpace::euclidean({0, 1}, {1, 0}), DomainError);
  CHECK_THROWS(MetricMeasureSpace::euclidean({0, 1}, {1}));
}

TEST_CASE("space csv round trip") {
  const auto s = make_jacobi_space(0.5, -0.3, 17);
  std::stringstream io;
  write_space_csv(s, io);
  CHECK(io.str().rfind("point,weight\n", 0) == 0);
  const auto back = read_space_csv(io, MetricKind::arccos);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back.point(i) == s.point(i));
    CHECK(back.weight(i) == s.weight(i));
  }
}
