#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "heatframe/geometry.hpp"
#include "heatframe/jacobi.hpp"
#include "heatframe/reporting.hpp"

namespace heatframe {

/// Relative size of the discarded spectral tail accepted without warning.
inline constexpr double kTailTolerance = 1e-12;

/// h_t(x_i, x_j) = sum_{l <= N} exp(-beta_l t) P_l(x_i) P_l(x_j) on the nodes.
struct HeatKernelEval {
  double t = 0.0;
  Eigen::MatrixXd table;
  std::size_t truncation_degree = 0;
  /// exp(-beta_N t): size of the first discarded term relative to the leading one.
  double tail_bound = 0.0;

  bool truncation_warning() const { return tail_bound >= kTailTolerance; }
};

/// Exactly symmetric kernel table. Throws DomainError for t <= 0.
HeatKernelEval heat_kernel(const SpectralBasis& basis, double t);

/// (R_t f)(x_i) = sum_j w_j h_t(x_i, x_j) f(x_j).
Eigen::VectorXd apply_heat(const HeatKernelEval& kernel, const Eigen::VectorXd& weights,
                           const Eigen::VectorXd& f);

/// Smallest N with exp(-beta_N t_min) < tolerance.
std::size_t degree_for_tail(const JacobiParams& params, double t_min,
                            double tolerance = kTailTolerance);

/// heat.markov: max_i |sum_j w_j h_t(x_i, x_j) - 1| <= 1e-8.
VerificationReport verify_markov(const MetricMeasureSpace& space, const HeatKernelEval& kernel);

/// heat.semigroup: max |h_{t+s} - h_t W h_s| / max |h_{t+s}| <= 1e-7.
VerificationReport verify_semigroup(const MetricMeasureSpace& space, const SpectralBasis& basis,
                                    double t, double s);

/// heat.eigen_action: max_{i <= i_max} ||R_t P_i - exp(-beta_i t) P_i||_inf <= 1e-9.
VerificationReport verify_eigen_action(const SpectralBasis& basis, double t, std::size_t i_max);

/// heat.contraction: for nodal f with 0 <= f <= 1, -1e-9 <= R_t f <= 1 + 1e-9.
/// Two reports per trial (lower and upper side).
std::vector<VerificationReport> verify_contraction(const SpectralBasis& basis,
                                                   const HeatKernelEval& kernel,
                                                   std::span<const Eigen::VectorXd> trials);

/// Pairs and triples for the fits are coordinates in [-1, 1], snapped to the
/// nearest node, so the same samples can be replayed on a refined space.
struct CoordinatePair {
  double x = 0.0;
  double y = 0.0;
};

/// Fits use pairs with d^2 / t up to this value; beyond it the kernel drops
/// below the roundoff floor of the truncated expansion.
inline constexpr double kGaussianFitRange = 40.0;

/// Slack factor between the extreme normalized kernel value and the fitted
/// prefactor: K = 2 max rho, c1' = min diagonal rho / 2.
inline constexpr double kGaussianFitSlack = 2.0;

/// Two-sided Gaussian constants for the normalized kernel
///   rho = h_t(x, y) (|B(x, sqrt t)| |B(y, sqrt t)|)^(1/2),
///   c1' exp(-c1 d^2 / t) <= rho <= K exp(-a d^2 / t).
struct GaussianFit {
  double K = 0.0;
  double a = 0.0;
  double c1_prime = 0.0;
  double c1 = 0.0;
  double min_rho = 0.0;
  std::size_t n_samples = 0;
  double max_margin = 0.0;

  FitReport report() const;
};

/// Every given pair is also evaluated on its diagonal (x, x). Throws
/// ExactnessError if the spectral tail at min(t_grid) is not negligible and
/// DomainError for t outside (0, 1].
GaussianFit fit_gaussian_bounds(const MetricMeasureSpace& space, const SpectralBasis& basis,
                                std::span<const double> t_grid,
                                std::span<const CoordinatePair> pairs);

struct HolderTriple {
  double s1 = 0.0;
  double s2 = 0.0;
  double s2_prime = 0.0;
};

/// Largest gamma_H with
///   |h_t(s1, s2) - h_t(s1, s2')| <= K (d(s2, s2') / sqrt t)^gamma_H G_t(s1, s2)
/// where G_t = exp(-a d(s1, s2)^2 / t) / sqrt(|B(s1, sqrt t)| |B(s2, sqrt t)|)
/// uses a from the Gaussian upper fit and K is kGaussianFitSlack times the
/// largest observed |difference| / G_t. Triples with d(s2, s2') > sqrt t (after
/// snapping), s2 = s2' or d(s1, s2)^2 / t > kGaussianFitRange are dropped; SamplingError if none remain.
/// Constants: {"gamma_H", "K"}.
FitReport fit_holder(const MetricMeasureSpace& space, const SpectralBasis& basis,
                     std::span<const double> t_grid, std::span<const HolderTriple> triples,
                     const GaussianFit& gaussian);

/// CSV with header "x_index,y_index,value".
void write_kernel_csv(const HeatKernelEval& kernel, std::ostream& out);

}  // namespace heatframe
