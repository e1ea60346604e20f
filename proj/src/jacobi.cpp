#include "heatframe/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "detail/format.hpp"
#include "heatframe/errors.hpp"

namespace heatframe {

namespace {

double weighted_dot(const SpectralBasis& basis, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  return (basis.weights().array() * f.array() * g.array()).sum();
}

void require_nodal(const SpectralBasis& basis, const Eigen::VectorXd& f) {
  if (static_cast<std::size_t>(f.size()) != basis.n_nodes()) {
    throw ContractError("nodal vector length differs from the number of nodes");
  }
}

}  // namespace

double eigenvalue(std::size_t i, const JacobiParams& params) {
  const double k = static_cast<double>(i);
  return k * (k + params.gamma + params.alpha + 1.0);
}

Eigen::VectorXd SpectralBasis::coefficients(const Eigen::VectorXd& nodal) const {
  require_nodal(*this, nodal);
  return values_ * weights_.cwiseProduct(nodal);
}

Eigen::VectorXd SpectralBasis::synthesize(const Eigen::VectorXd& coefficients) const {
  if (static_cast<std::size_t>(coefficients.size()) != degree_ + 1) {
    throw ContractError("coefficient vector length must be degree + 1");
  }
  return values_.transpose() * coefficients;
}

Eigen::VectorXd SpectralBasis::derivative(const Eigen::VectorXd& coefficients) const {
  if (static_cast<std::size_t>(coefficients.size()) != degree_ + 1) {
    throw ContractError("coefficient vector length must be degree + 1");
  }
  return derivatives_.transpose() * coefficients;
}

double SpectralBasis::truncation_residual(const Eigen::VectorXd& nodal) const {
  const Eigen::VectorXd rest = nodal - synthesize(coefficients(nodal));
  const double norm = std::sqrt(weighted_dot(*this, nodal, nodal));
  const double res = std::sqrt(weighted_dot(*this, rest, rest));
  return norm > 0.0 ? res / norm : res;
}

SpectralBasis build_basis(const MetricMeasureSpace& space, std::size_t degree) {
  if (!space.jacobi_params()) throw DomainError("build_basis needs a Jacobi space");
  const std::size_t n = space.size();
  if (degree + 1 > n) {
    throw ExactnessError("degree " + std::to_string(degree) + " needs at least " +
                         std::to_string(degree + 1) + " quadrature nodes (have " +
                         std::to_string(n) + ")");
  }
  SpectralBasis b;
  b.params_ = *space.jacobi_params();
  b.degree_ = degree;
  const auto rows = static_cast<Eigen::Index>(degree + 1);
  const auto cols = static_cast<Eigen::Index>(n);
  b.nodes_.resize(cols);
  b.weights_.resize(cols);
  b.values_.resize(rows, cols);
  b.derivatives_.resize(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double x = space.point(static_cast<std::size_t>(j));
    b.nodes_[j] = x;
    b.weights_[j] = space.weight(static_cast<std::size_t>(j));
    const auto vd = orthonormal_values_and_derivatives(b.params_, degree, x);
    for (Eigen::Index i = 0; i < rows; ++i) {
      b.values_(i, j) = vd.values[static_cast<std::size_t>(i)];
      b.derivatives_(i, j) = vd.derivatives[static_cast<std::size_t>(i)];
    }
  }
  b.eigenvalues_.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    b.eigenvalues_[i] = eigenvalue(static_cast<std::size_t>(i), b.params_);
  }
  return b;
}

SpectralResult apply_L(const SpectralBasis& basis, const Eigen::VectorXd& f) {
  const Eigen::VectorXd c = basis.coefficients(f);
  return {basis.synthesize(basis.eigenvalues().cwiseProduct(c)), basis.truncation_residual(f)};
}

double form_omega(const SpectralBasis& basis, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const Eigen::VectorXd df = basis.derivative(basis.coefficients(f));
  const Eigen::VectorXd dg = basis.derivative(basis.coefficients(g));
  const Eigen::VectorXd u = (1.0 - basis.nodes().array().square()).matrix();
  return (basis.weights().array() * u.array() * df.array() * dg.array()).sum();
}

Eigen::VectorXd carre_du_champ(const SpectralBasis& basis, const Eigen::VectorXd& f,
                               const Eigen::VectorXd& g) {
  require_nodal(basis, f);
  require_nodal(basis, g);
  const Eigen::VectorXd fg = f.cwiseProduct(g);
  for (const Eigen::VectorXd* v : {&f, &g, &fg}) {
    if (basis.truncation_residual(*v) > kTruncationTolerance) {
      throw TruncationError("carre_du_champ: product exceeds the basis degree");
    }
  }
  const Eigen::VectorXd lf = apply_L(basis, f).values;
  const Eigen::VectorXd lg = apply_L(basis, g).values;
  const Eigen::VectorXd lfg = apply_L(basis, fg).values;
  return 0.5 * (f.cwiseProduct(lg) + g.cwiseProduct(lf) - lfg);
}

Eigen::VectorXd carre_du_champ_direct(const SpectralBasis& basis, const Eigen::VectorXd& f,
                                      const Eigen::VectorXd& g) {
  const Eigen::VectorXd df = basis.derivative(basis.coefficients(f));
  const Eigen::VectorXd dg = basis.derivative(basis.coefficients(g));
  return ((1.0 - basis.nodes().array().square()) * df.array() * dg.array()).matrix();
}

VerificationReport verify_orthonormality(const SpectralBasis& basis) {
  const Eigen::MatrixXd gram =
      basis.values() * basis.weights().asDiagonal() * basis.values().transpose();
  const double defect =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  return upper_bound_report("jacobi.orthonormality", defect, 1e-10, 0.0,
                            {{"degree", static_cast<double>(basis.degree())},
                             {"n_nodes", static_cast<double>(basis.n_nodes())}});
}

std::vector<VerificationReport> verify_form_symmetry(
    const SpectralBasis& basis,
    std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs) {
  std::vector<VerificationReport> out;
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto& [f, g] = pairs[t];
    const double omega = form_omega(basis, f, g);
    const double lf_g = weighted_dot(basis, apply_L(basis, f).values, g);
    const double f_lg = weighted_dot(basis, f, apply_L(basis, g).values);
    const double tol = 1e-9 * std::max({1.0, std::abs(omega), std::abs(lf_g)});
    const double defect = std::max(std::abs(lf_g - omega), std::abs(omega - f_lg));
    out.push_back(upper_bound_report("jacobi.form_symmetry", defect, tol, 0.0,
                                     {{"trial", static_cast<double>(t)}, {"omega", omega}}));
  }
  return out;
}

std::vector<VerificationReport> verify_carre_du_champ(
    const SpectralBasis& basis,
    std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs) {
  std::vector<VerificationReport> out;
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto& [f, g] = pairs[t];
    const Eigen::VectorXd op = carre_du_champ(basis, f, g);
    const Eigen::VectorXd direct = carre_du_champ_direct(basis, f, g);
    const Eigen::VectorXd energy = carre_du_champ(basis, f, f);
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    const double energy_scale = std::max(1.0, energy.cwiseAbs().maxCoeff());
    const Context ctx{{"trial", static_cast<double>(t)}, {"scale", scale}};
    out.push_back(upper_bound_report("jacobi.carre_du_champ", (op - direct).cwiseAbs().maxCoeff(),
                                     1e-8 * scale, 0.0, ctx));
    out.push_back(lower_bound_report("jacobi.carre_du_champ.positivity", energy.minCoeff(),
                                     -1e-10 * energy_scale, 0.0,
                                     {{"trial", static_cast<double>(t)}, {"scale", energy_scale}}));
  }
  return out;
}

FitReport verify_poincare(const MetricMeasureSpace& space, const SpectralBasis& basis,
                          std::span<const PoincareBall> balls,
                          std::span<const Eigen::VectorXd> coefficient_trials) {
  std::vector<double> ratios;
  for (const auto& coeffs : coefficient_trials) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.degree() + 1));
    const auto len = std::min(c.size(), coeffs.size());
    c.head(len) = coeffs.head(len);
    const Eigen::VectorXd f = basis.synthesize(c);
    const Eigen::VectorXd energy = carre_du_champ(basis, f, f);
    for (const auto& ball : balls) {
      if (!(ball.r > 0.0) || ball.r > 1.0) throw DomainError("Poincare balls need 0 < r <= 1");
      const std::size_t center = space.nearest_index(ball.center);
      double mass = 0.0, mean = 0.0, grad = 0.0;
      std::size_t count = 0;
      for (std::size_t j = 0; j < space.size(); ++j) {
        if (space.distance(center, j) < ball.r) {
          const double w = space.weight(j);
          mass += w;
          mean += w * f[static_cast<Eigen::Index>(j)];
          grad += w * energy[static_cast<Eigen::Index>(j)];
          ++count;
        }
      }
      if (count < 2 || !(grad > 0.0)) continue;
      mean /= mass;
      double spread = 0.0;
      for (std::size_t j = 0; j < space.size(); ++j) {
        if (space.distance(center, j) < ball.r) {
          const double dev = f[static_cast<Eigen::Index>(j)] - mean;
          spread += space.weight(j) * dev * dev;
        }
      }
      // Numerically constant on the ball: any K works.
      if (spread <= 1e-24 * mass * std::max(1.0, f.squaredNorm())) continue;
      ratios.push_back(spread / (ball.r * ball.r * grad));
    }
  }
  FitReport fit;
  fit.bound_id = "fit.poincare";
  fit.n_samples = ratios.size();
  if (ratios.empty()) {
    fit.fitted_constants["K"] = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double K = *std::max_element(ratios.begin(), ratios.end());
  fit.fitted_constants["K"] = K;
  double slack = 0.0;
  for (double r : ratios) slack = std::max(slack, K > 0.0 ? 1.0 - r / K : 0.0);
  fit.max_margin = slack;
  fit.stable = std::isfinite(K);
  return fit;
}

void write_basis_csv(const SpectralBasis& basis, std::ostream& out) {
  out << "i,beta_i";
  for (std::size_t j = 0; j < basis.n_nodes(); ++j) out << ",node_" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < basis.values().rows(); ++i) {
    out << i << ',' << detail::format_double(basis.eigenvalues()[i]);
    for (Eigen::Index j = 0; j < basis.values().cols(); ++j) {
      out << ',' << detail::format_double(basis.values()(i, j));
    }
    out << '\n';
  }
}

}  // namespace heatframe
