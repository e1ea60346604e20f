#include <doctest.h>

#include <cmath>
#include <sstream>

#include "heatframe/errors.hpp"
#include "heatframe/heat.hpp"
#include "heatframe/operators.hpp"
#include "heatframe/sampling.hpp"

using namespace heatframe;

namespace {

struct Setup {
  MetricMeasureSpace space;
  SpectralBasis basis;
  DoublingProfile profile;
};

Setup legendre(std::size_t n = 64, std::size_t degree = 40) {
  auto s = make_jacobi_space(0, 0, n);
  auto b = build_basis(s, degree);
  auto p = exact_doubling_profile(s);
  return {std::move(s), std::move(b), p};
}

Eigen::VectorXd weights(const MetricMeasureSpace& s) {
  return Eigen::Map<const Eigen::VectorXd>(s.weights().data(), static_cast<Eigen::Index>(s.size()));
}

}  // namespace

TEST_CASE("apply operator basics") {
  const auto [s, b, p] = legendre();
  Rng rng(61);
  const Eigen::VectorXd f = b.synthesize(random_coefficients(rng, 40, 41));
  const KernelOperator zero(Eigen::MatrixXd::Zero(64, 64));
  CHECK(apply_operator(s, zero, f).cwiseAbs().maxCoeff() == 0.0);
  const KernelOperator diag(weights(s).cwiseInverse().asDiagonal().toDenseMatrix());
  CHECK((apply_operator(s, diag, f) - f).cwiseAbs().maxCoeff() <= 1e-13);
  const KernelOperator heat(heat_kernel(b, 0.3).table);
  for (Eigen::Index i = 0; i <= 10; ++i) {
    const Eigen::VectorXd pi = b.values().row(i).transpose();
    CHECK((apply_operator(s, heat, pi) - std::exp(-0.3 * b.eigenvalues()[i]) * pi).cwiseAbs().maxCoeff() <= 1e-9);
  }
  CHECK_THROWS_AS(apply_operator(s, zero, Eigen::VectorXd::Zero(3)), ContractError);
}

TEST_CASE("Lp norms") {
  const auto s = make_jacobi_space(0, 0, 32);
  const Eigen::VectorXd one = Eigen::VectorXd::Constant(32, 1.0);
  CHECK(lp_norm(s, one, 1.0) == doctest::Approx(2.0));
  CHECK(lp_norm(s, one, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(lp_norm(s, -3.0 * one, INFINITY) == 3.0);
}

TEST_CASE("Young exponent and constant") {
  CHECK(young_exponent(2, 2) == 1.0);
  CHECK(std::isinf(young_exponent(1, INFINITY)));
  CHECK(young_exponent(1, 2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(young_exponent(2, 1), DomainError);
  const DominationCertificate cert{1.5, {0.2, 3.0, 1}};
  // r = 1: the ahat factor drops out.
  CHECK(young_constant(cert, 0.7, 2, 2) == doctest::Approx(1.5 * 8.0));
  // r = inf: ahat^-k.
  CHECK(young_constant(cert, 0.7, 1, INFINITY) == doctest::Approx(1.5 * 8.0 / (0.5 * 0.7)));
}

TEST_CASE("domination certificate is checked at construction") {
  const auto [s, b, p] = legendre();
  const EnvelopeParams params{0.2, 2.0 * p.k() + 1, p.k()};
  const Eigen::MatrixXd h = heat_kernel(b, 0.04).table;
  const double a = fit_domination(s, h, params);
  CHECK(a > 0.0);
  const auto op = KernelOperator::dominated(s, h, {a, params});
  REQUIRE(op.domination());
  CHECK(op.domination()->a_prime == a);
  CHECK_THROWS_AS(KernelOperator::dominated(s, h, {0.5 * a, params}), ContractError);
}

TEST_CASE("Young bound on heat kernels") {
  const auto [s, b, p] = legendre();
  const int k = p.k();
  const double delta = 0.2;
  const EnvelopeParams params{delta, 2.0 * k + 1, k};
  const Eigen::MatrixXd h = heat_kernel(b, delta * delta).table;
  const auto op = KernelOperator::dominated(s, h, {fit_domination(s, h, params), params});
  Rng rng(67);
  for (auto [pp, qq] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, 2.0}, {1.0, INFINITY}, {2.0, INFINITY}}) {
    std::vector<Eigen::VectorXd> trials(20);
    for (auto& f : trials) f = b.synthesize(random_coefficients(rng, 40, 41));
    const auto reports = verify_young(s, op, p, pp, qq, trials);
    CHECK(reports.size() == 20);
    for (const auto& r : reports) CHECK(r.passed);
    const double a = young_constant(*op.domination(), p.a_noncollapse, pp, qq);
    const double rhs_scale = a * std::pow(delta, k * (1 / qq - 1 / pp));
    for (std::size_t t = 0; t < trials.size(); ++t) {
      const Eigen::VectorXd hf = h.transpose() * weights(s).cwiseProduct(trials[t]);
      const double lhs = std::isinf(qq) ? hf.cwiseAbs().maxCoeff()
                                        : std::pow((weights(s).array() * hf.array().abs().pow(qq)).sum(), 1 / qq);
      const double fp = std::pow((weights(s).array() * trials[t].array().abs().pow(pp)).sum(), 1 / pp);
      CHECK(lhs <= rhs_scale * fp);
      CHECK(reports[t].lhs == doctest::Approx(lhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("Young bound on constants and its preconditions") {
  const auto [s, b, p] = legendre();
  const int k = p.k();
  const EnvelopeParams params{0.2, 2.0 * k + 1, k};
  const Eigen::MatrixXd h = heat_kernel(b, 0.04).table;
  const auto op = KernelOperator::dominated(s, h, {fit_domination(s, h, params), params});
  const std::vector<Eigen::VectorXd> constant{Eigen::VectorXd::Constant(64, 2.0)};
  for (const auto& r : verify_young(s, op, p, 1.0, 2.0, constant)) {
    CHECK(r.passed);
    CHECK(r.lhs == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(verify_young(s, KernelOperator(h), p, 1, 1, constant), ContractError);
  const EnvelopeParams low{0.2, 2.0 * k, k};
  const auto weak = KernelOperator::dominated(s, h, {fit_domination(s, h, low), low});
  CHECK_THROWS_AS(verify_young(s, weak, p, 1, 1, constant), DomainError);
}

TEST_CASE("Schur test") {
  const auto [s, b, p] = legendre();
  const Eigen::MatrixXd h = heat_kernel(b, 0.1).table;
  CHECK(schur_constant(s, h, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(schur_constant(s, Eigen::MatrixXd::Zero(64, 64), 2.0) == 0.0);
  Rng rng(71);
  std::vector<Eigen::VectorXd> trials(10);
  for (auto& f : trials) f = b.synthesize(random_coefficients(rng, 40, 41));
  for (const auto& r : verify_schur(s, KernelOperator(h), 2, 2, trials)) CHECK(r.passed);
  for (const auto& r : verify_schur(s, KernelOperator(Eigen::MatrixXd::Zero(64, 64)), 1, 2, trials)) {
    CHECK(r.passed);
    CHECK(r.rhs == 0.0);
  }
  // Random envelope-dominated kernel.
  const EnvelopeParams params{0.2, 2.0 * p.k() + 1, p.k()};
  const EnvelopeTable env(s, params);
  Eigen::MatrixXd random(64, 64);
  for (Eigen::Index i = 0; i < 64; ++i) {
    for (Eigen::Index j = 0; j < 64; ++j) {
      random(i, j) = uniform(rng, -1, 1) * env(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  for (auto [pp, qq] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, INFINITY}}) {
    for (const auto& r : verify_schur(s, KernelOperator(random), pp, qq, trials)) CHECK(r.passed);
  }
}

TEST_CASE("spectral multipliers") {
  const auto [s, b, p] = legendre();
  Rng rng(73);
  const Eigen::VectorXd f = b.synthesize(random_coefficients(rng, 40, 41));
  const auto identity = spectral_multiplier(b, [](double) { return 1.0; });
  CHECK((apply_operator(s, identity, f) - f).cwiseAbs().maxCoeff() <= 1e-11);
  const auto heat = spectral_multiplier(b, [](double beta) { return std::exp(-0.25 * beta); });
  CHECK((heat.table() - heat_kernel(b, 0.25).table).cwiseAbs().maxCoeff() <= 1e-13);
  const double beta1 = b.eigenvalues()[1];
  const auto low = spectral_multiplier(b, [beta1](double beta) { return beta <= beta1 ? 1.0 : 0.0; });
  Eigen::VectorXd x2(64);
  for (Eigen::Index i = 0; i < 64; ++i) x2[i] = b.nodes()[i] * b.nodes()[i];
  CHECK((apply_operator(s, low, x2).array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("multipliers commute") {
  const auto [s, b, p] = legendre();
  Rng rng(79);
  std::vector<Eigen::VectorXd> trials(10);
  for (auto& f : trials) f = b.synthesize(random_coefficients(rng, 40, 41));
  const auto reports = verify_multiplier_commute(
      s, b, [](double x) { return std::exp(-0.1 * x); }, [](double x) { return 1 / (1 + x); }, trials);
  for (const auto& r : reports) CHECK(r.passed);
}

TEST_CASE("band blocks partition the indices") {
  const auto [s, b, p] = legendre();
  const auto blocks = band_blocks(b);
  REQUIRE_FALSE(blocks.empty());
  CHECK(blocks[0].j == 0);
  CHECK(blocks[0].first == 0);
  CHECK(blocks[0].last == 0);
  std::size_t next = 0;
  for (const auto& blk : blocks) {
    CHECK(blk.first == next);
    next = blk.last + 1;
    for (std::size_t i = blk.first; i <= blk.last && blk.j > 0; ++i) {
      const double beta = b.eigenvalues()[static_cast<Eigen::Index>(i)];
      CHECK(beta <= std::exp2(2.0 * blk.j));
      if (blk.j > 1) CHECK(beta > std::exp2(2.0 * (blk.j - 1)));
    }
  }
  CHECK(next == 41);
}

TEST_CASE("band decomposition") {
  const auto [s, b, p] = legendre();
  const Net net = build_partition(s, build_maximal_net(s, 0.2));
  SUBCASE("P0 lives in block zero") {
    const Eigen::VectorXd p0 = b.values().row(0).transpose();
    const auto dec = band_decompose(s, b, net, p0);
    CHECK(dec.block_energies[0] == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t j = 1; j < dec.block_energies.size(); ++j) CHECK(dec.block_energies[j] <= 1e-25);
  }
  SUBCASE("Parseval and reconstruction") {
    Rng rng(83);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd f = b.synthesize(random_coefficients(rng, trial < 10 ? 12 : 40, 41));
      const auto dec = band_decompose(s, b, net, f);
      double total = 0.0;
      for (double e : dec.block_energies) total += e;
      const double norm2 = (weights(s).array() * f.array().square()).sum();
      CHECK(std::abs(total - norm2) <= 1e-10);
      CHECK((dec.reconstruction - f).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(std::isfinite(dec.frame_ratio));
      CHECK(dec.frame_ratio >= 1.0);
      for (const auto& r : verify_band(s, dec, f)) CHECK(r.passed);
      CHECK(frame_bounds_report(dec).stable);
    }
  }
  SUBCASE("net from another space") {
    const auto other = make_jacobi_space(0, 0, 32);
    const Net foreign = build_partition(other, build_maximal_net(other, 0.2));
    CHECK_THROWS_AS(band_decompose(s, b, foreign, Eigen::VectorXd::Zero(64)), ContractError);
    CHECK_THROWS_AS(band_decompose(s, b, build_maximal_net(s, 0.2), Eigen::VectorXd::Zero(64)),
                    ContractError);
  }
}

TEST_CASE("decomposition export") {
  const auto [s, b, p] = legendre(16, 10);
  const Net net = build_partition(s, build_maximal_net(s, 0.5));
  const auto dec = band_decompose(s, b, net, b.values().row(3).transpose());
  std::ostringstream out;
  write_decomposition_csv(dec, net, out);
  CHECK(out.str().rfind("j,center_index,coefficient\n", 0) == 0);
  const nlohmann::json j = dec;
  CHECK(j["blocks"].size() == dec.blocks.size());
  CHECK(j.contains("frame_ratio"));
}
