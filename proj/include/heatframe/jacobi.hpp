#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "heatframe/geometry.hpp"
#include "heatframe/polynomials.hpp"
#include "heatframe/reporting.hpp"

namespace heatframe {

/// beta_i = i (i + gamma + alpha + 1), the eigenvalue of L on the degree-i polynomial.
double eigenvalue(std::size_t i, const JacobiParams& params);

/// Orthonormal Jacobi polynomials P_0..P_N tabulated at the quadrature nodes
/// of a Jacobi space, with their derivatives and the eigenvalues of L.
///
/// Functions are passed around as nodal values; `coefficients` and
/// `synthesize` move between nodal values and expansion coefficients.
class SpectralBasis {
 public:
  const JacobiParams& params() const { return params_; }
  std::size_t degree() const { return degree_; }
  std::size_t n_nodes() const { return static_cast<std::size_t>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// (degree + 1) x n_nodes
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::MatrixXd& derivatives() const { return derivatives_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  /// c_i = sum_j w_j f(x_j) P_i(x_j)
  Eigen::VectorXd coefficients(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coefficients) const;
  /// Nodal values of f' for f given by its coefficients.
  Eigen::VectorXd derivative(const Eigen::VectorXd& coefficients) const;
  /// Relative weighted L2 norm of the part of `nodal` above degree N.
  double truncation_residual(const Eigen::VectorXd& nodal) const;

 private:
  friend SpectralBasis build_basis(const MetricMeasureSpace& space, std::size_t degree);

  JacobiParams params_;
  std::size_t degree_ = 0;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd derivatives_;
  Eigen::VectorXd eigenvalues_;
};

/// Requires a space from make_jacobi_space (DomainError otherwise) and
/// degree <= n_nodes - 1 so the rule integrates all degree-2N products exactly
/// (ExactnessError otherwise).
SpectralBasis build_basis(const MetricMeasureSpace& space, std::size_t degree);

/// Residual above which spectral operations flag truncation.
inline constexpr double kTruncationTolerance = 1e-9;

struct SpectralResult {
  Eigen::VectorXd values;
  double truncation_residual = 0.0;
  bool truncated() const { return truncation_residual > kTruncationTolerance; }
};

/// Lf = -(w u f')' / w with u = 1 - x^2, applied spectrally.
SpectralResult apply_L(const SpectralBasis& basis, const Eigen::VectorXd& f);

/// omega(f, g) = int (1 - x^2) f' g' w dx by quadrature.
double form_omega(const SpectralBasis& basis, const Eigen::VectorXd& f, const Eigen::VectorXd& g);

/// Gamma(f, g) = (f Lg + g Lf - L(fg)) / 2 at the nodes.
/// Throws TruncationError when fg is not representable up to degree N.
Eigen::VectorXd carre_du_champ(const SpectralBasis& basis, const Eigen::VectorXd& f,
                               const Eigen::VectorXd& g);

/// (1 - x^2) f' g' from recurrence derivatives; the closed form of Gamma.
Eigen::VectorXd carre_du_champ_direct(const SpectralBasis& basis, const Eigen::VectorXd& f,
                                      const Eigen::VectorXd& g);

/// jacobi.orthonormality: max |sum_j w_j P_i P_m - delta_im| <= 1e-10.
VerificationReport verify_orthonormality(const SpectralBasis& basis);

/// jacobi.form_symmetry: |<Lf, g> - omega(f, g)| and |omega(f, g) - <f, Lg>| <= 1e-9 (scaled).
std::vector<VerificationReport> verify_form_symmetry(
    const SpectralBasis& basis, std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs);

/// jacobi.carre_du_champ: operator identity vs (1 - x^2) f' g' within 1e-8;
/// jacobi.carre_du_champ.positivity: Gamma(f, f) >= -1e-10 at every node.
/// Both tolerances are multiplied by max(1, sup norm of the compared values).
std::vector<VerificationReport> verify_carre_du_champ(
    const SpectralBasis& basis, std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs);

struct PoincareBall {
  double center = 0.0;  // snapped to the nearest node
  double r = 0.0;
};

/// Smallest K with int_B |f - f_B|^2 <= K r^2 int_B Gamma(f, f) over the
/// sampled balls and functions (given by expansion coefficients).
/// Constant: {"K"}. max_margin is the largest relative slack 1 - ratio / K.
FitReport verify_poincare(const MetricMeasureSpace& space, const SpectralBasis& basis,
                          std::span<const PoincareBall> balls,
                          std::span<const Eigen::VectorXd> coefficient_trials);

/// CSV with header "i,beta_i,node_0,...,node_{n-1}".
void write_basis_csv(const SpectralBasis& basis, std::ostream& out);

}  // namespace heatframe
