#include <doctest.h>

#include <cmath>
#include <sstream>

#include "heatframe/errors.hpp"
#include "heatframe/jacobi.hpp"
#include "heatframe/sampling.hpp"

using namespace heatframe;

namespace {

Eigen::VectorXd nodal(const SpectralBasis& b, double (*f)(double)) {
  Eigen::VectorXd v(b.nodes().size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f(b.nodes()[i]);
  return v;
}

}  // namespace

TEST_CASE("eigenvalues") {
  CHECK(eigenvalue(0, {0.7, -0.2}) == 0.0);
  CHECK(eigenvalue(1, {0.0, 0.0}) == 2.0);
  CHECK(eigenvalue(2, {0.5, 0.5}) == 8.0);
  const auto s = make_jacobi_space(0.5, -0.3, 40);
  const auto b = build_basis(s, 30);
  CHECK(b.eigenvalues()[0] == 0.0);
  for (Eigen::Index i = 1; i <= 30; ++i) CHECK(b.eigenvalues()[i] > b.eigenvalues()[i - 1]);
}

TEST_CASE("basis preconditions") {
  const auto s = make_jacobi_space(0, 0, 10);
  CHECK_THROWS_AS(build_basis(s, 10), ExactnessError);
  CHECK_NOTHROW(build_basis(s, 9));
  const auto line = MetricMeasureSpace::euclidean({0, 1, 2}, {1, 1, 1});
  CHECK_THROWS_AS(build_basis(line, 1), DomainError);
}

TEST_CASE("Legendre basis elements") {
  const auto b = build_basis(make_jacobi_space(0, 0, 64), 20);
  for (Eigen::Index j = 0; j < 64; ++j) {
    CHECK(b.values()(0, j) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(b.values()(1, j) == doctest::Approx(b.nodes()[j] * std::sqrt(1.5)).epsilon(1e-13));
  }
}

TEST_CASE("orthonormality table") {
  for (auto [g, a] : {std::pair{0.0, 0.0}, {0.5, -0.3}, {-0.5, 2.0}}) {
    const auto b = build_basis(make_jacobi_space(g, a, 64), 20);
    const Eigen::MatrixXd gram = b.values() * b.weights().asDiagonal() * b.values().transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(verify_orthonormality(b).passed);
  }
}

TEST_CASE("generator on basis elements and monomials") {
  const auto b = build_basis(make_jacobi_space(0, 0, 64), 20);
  for (Eigen::Index i = 0; i <= 20; ++i) {
    const Eigen::VectorXd p = b.values().row(i).transpose();
    const auto r = apply_L(b, p);
    CHECK((r.values - b.eigenvalues()[i] * p).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK_FALSE(r.truncated());
  }
  const auto c = apply_L(b, Eigen::VectorXd::Constant(64, 2.5));
  CHECK(c.values.cwiseAbs().maxCoeff() <= 1e-10);
  const auto x2 = apply_L(b, nodal(b, [](double x) { return x * x; }));
  const Eigen::VectorXd ref = nodal(b, [](double x) { return -2 + 6 * x * x; });
  CHECK((x2.values - ref).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("truncation is flagged for non-polynomial input") {
  const auto b = build_basis(make_jacobi_space(0, 0, 64), 10);
  const auto r = apply_L(b, nodal(b, [](double x) { return std::abs(x); }));
  CHECK(r.truncated());
}

TEST_CASE("form omega") {
  const auto b = build_basis(make_jacobi_space(0, 0, 64), 20);
  const Eigen::VectorXd p1 = b.values().row(1).transpose();
  CHECK(form_omega(b, p1, p1) == doctest::Approx(2.0).epsilon(1e-13));
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd f = b.synthesize(random_coefficients(rng, 10, 21));
    const Eigen::VectorXd g = b.synthesize(random_coefficients(rng, 10, 21));
    CHECK(std::abs(form_omega(b, Eigen::VectorXd::Constant(64, 1.0), g)) <= 1e-12);
    CHECK(form_omega(b, f, g) == doctest::Approx(form_omega(b, g, f)).epsilon(1e-12));
    CHECK(form_omega(b, f, f) >= 0.0);
  }
}

TEST_CASE("form symmetry reports") {
  const auto b = build_basis(make_jacobi_space(0.5, -0.3, 64), 40);
  Rng rng(29);
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs(20);
  for (auto& [f, g] : pairs) {
    f = b.synthesize(random_coefficients(rng, 20, 41));
    g = b.synthesize(random_coefficients(rng, 20, 41));
  }
  for (const auto& r : verify_form_symmetry(b, pairs)) CHECK(r.passed);
}

TEST_CASE("carre du champ") {
  const auto b = build_basis(make_jacobi_space(0, 0, 64), 20);
  const Eigen::VectorXd x = nodal(b, [](double t) { return t; });
  const Eigen::VectorXd ref = nodal(b, [](double t) { return 1 - t * t; });
  CHECK((carre_du_champ(b, x, x) - ref).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((carre_du_champ_direct(b, x, x) - ref).cwiseAbs().maxCoeff() <= 1e-12);
  Rng rng(31);
  const Eigen::VectorXd g = b.synthesize(random_coefficients(rng, 10, 21));
  CHECK(carre_du_champ(b, Eigen::VectorXd::Constant(64, 4.0), g).cwiseAbs().maxCoeff() <= 1e-10);
  const Eigen::VectorXd high = b.values().row(20).transpose();
  CHECK_THROWS_AS(carre_du_champ(b, high, high), TruncationError);
}

TEST_CASE("carre du champ identity and positivity on random pairs") {
  for (auto [gm, al] : {std::pair{0.0, 0.0}, {0.5, -0.3}}) {
    const auto b = build_basis(make_jacobi_space(gm, al, 64), 40);
    Rng rng(37);
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs(20);
    for (auto& [f, g] : pairs) {
      f = b.synthesize(random_coefficients(rng, 20, 41));
      g = b.synthesize(random_coefficients(rng, 20, 41));
      const Eigen::VectorXd direct = carre_du_champ_direct(b, f, g);
      const double scale = gm == 0.0 ? 1.0 : std::max(1.0, direct.cwiseAbs().maxCoeff());
      CHECK((carre_du_champ(b, f, g) - direct).cwiseAbs().maxCoeff() <= 1e-8 * scale);
      const Eigen::VectorXd energy = carre_du_champ(b, f, f);
      CHECK(energy.minCoeff() >= -1e-10 * std::max(1.0, energy.maxCoeff()));
    }
    for (const auto& r : verify_carre_du_champ(b, pairs)) CHECK(r.passed);
  }
}

TEST_CASE("Poincare fit") {
  const auto s = make_jacobi_space(0, 0, 64);
  const auto b = build_basis(s, 40);
  const std::vector<PoincareBall> whole{{0.0, 1.0}};
  SUBCASE("P1 on a large ball matches direct quadrature") {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
    c[1] = 1.0;
    const std::vector<Eigen::VectorXd> trials{c};
    const auto fit = verify_poincare(s, b, whole, trials);
    const std::size_t center = s.nearest_index(0.0);
    double mass = 0, mean = 0, grad = 0, spread = 0;
    for (std::size_t j = 0; j < 64; ++j) {
      if (s.distance(center, j) < 1.0) {
        const double x = s.point(j);
        mass += s.weight(j);
        mean += s.weight(j) * std::sqrt(1.5) * x;
        grad += s.weight(j) * 1.5 * (1 - x * x);
      }
    }
    mean /= mass;
    for (std::size_t j = 0; j < 64; ++j) {
      if (s.distance(center, j) < 1.0) {
        spread += s.weight(j) * std::pow(std::sqrt(1.5) * s.point(j) - mean, 2);
      }
    }
    CHECK(fit.fitted_constants.at("K") == doctest::Approx(spread / grad).epsilon(1e-12));
    CHECK(fit.stable);
  }
  SUBCASE("constants do not constrain") {
    const std::vector<Eigen::VectorXd> trials{Eigen::VectorXd::Unit(1, 0)};
    const auto fit = verify_poincare(s, b, whole, trials);
    CHECK(fit.n_samples == 0);
    CHECK_FALSE(fit.stable);
  }
  SUBCASE("radius above one is rejected") {
    const std::vector<PoincareBall> big{{0.0, 1.5}};
    const std::vector<Eigen::VectorXd> trials{Eigen::VectorXd::Unit(2, 1)};
    CHECK_THROWS_AS(verify_poincare(s, b, big, trials), DomainError);
  }
}

TEST_CASE("Poincare constant is stable under doubling nodes") {
  Rng rng(7);
  std::vector<PoincareBall> balls(20);
  for (auto& ball : balls) ball = {uniform(rng, -1, 1), uniform(rng, 0.2, 1)};
  std::vector<Eigen::VectorXd> trials(10);
  for (auto& c : trials) c = random_coefficients(rng, 20, 21);
  for (auto [g, a] : {std::pair{0.0, 0.0}, {0.5, -0.3}}) {
    const auto coarse_space = make_jacobi_space(g, a, 64);
    const auto fine_space = make_jacobi_space(g, a, 128);
    const auto coarse = verify_poincare(coarse_space, build_basis(coarse_space, 40), balls, trials);
    const auto fine = verify_poincare(fine_space, build_basis(fine_space, 80), balls, trials);
    CHECK(with_stability(coarse, fine, 0.1).stable);
  }
}

TEST_CASE("basis csv") {
  const auto b = build_basis(make_jacobi_space(0, 0, 4), 2);
  std::ostringstream out;
  write_basis_csv(b, out);
  CHECK(out.str().rfind("i,beta_i,node_0,node_1,node_2,node_3\n0,0,", 0) == 0);
}
