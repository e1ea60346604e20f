#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "heatframe/polynomials.hpp"
#include "heatframe/reporting.hpp"

namespace heatframe {

enum class MetricKind { arccos, euclidean, custom_table };

/// A finite sample of a metric measure space (M, d, sigma): points, positive
/// quadrature weights approximating sigma, and the metric.
///
/// Immutable after construction; every query is const and thread-safe.
class MetricMeasureSpace {
 public:
  /// Points in [-1, 1] with d(x, y) = |arccos x - arccos y|. The diameter is
  /// pi, the diameter of the underlying interval.
  static MetricMeasureSpace arccos(std::vector<double> points, std::vector<double> weights);
  /// Points on the line with d(x, y) = |x - y|; diameter is the sample spread.
  static MetricMeasureSpace euclidean(std::vector<double> points, std::vector<double> weights);
  /// Arbitrary labels with an explicit symmetric distance table.
  static MetricMeasureSpace custom(std::vector<double> labels, std::vector<double> weights,
                                   Eigen::MatrixXd distances);

  std::size_t size() const { return points_.size(); }
  double point(std::size_t i) const { return points_.at(i); }
  const std::vector<double>& points() const { return points_; }
  double weight(std::size_t i) const { return weights_.at(i); }
  const std::vector<double>& weights() const { return weights_; }
  MetricKind metric_kind() const { return kind_; }
  double diameter() const { return diameter_; }
  double total_mass() const { return total_mass_; }

  double distance(std::size_t i, std::size_t j) const;

  /// Largest gap between neighbouring points. Balls with radius at least this
  /// always see a new point when doubled (until they fill the space).
  double resolution() const { return resolution_; }

  /// Index of the point equal to `x`; throws DomainError if absent.
  std::size_t index_of(double x) const;
  /// Index of the point closest to `x` in the metric coordinate.
  std::size_t nearest_index(double x) const;

  /// Set for spaces built by make_jacobi_space.
  const std::optional<JacobiParams>& jacobi_params() const { return jacobi_; }

 private:
  friend MetricMeasureSpace make_jacobi_space(double gamma, double alpha, std::size_t n_nodes);

  MetricMeasureSpace(std::vector<double> points, std::vector<double> weights, MetricKind kind);
  void finish(std::optional<double> diameter);

  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> coords_;  // arccos angles or the points themselves
  Eigen::MatrixXd table_;       // custom_table only
  MetricKind kind_;
  double diameter_ = 0.0;
  double total_mass_ = 0.0;
  double resolution_ = 0.0;
  std::optional<JacobiParams> jacobi_;
};

/// Gauss-Jacobi nodes and weights for (1 - x)^gamma (1 + x)^alpha with the
/// intrinsic arccos metric.
MetricMeasureSpace make_jacobi_space(double gamma, double alpha, std::size_t n_nodes);

/// Weight of the open ball {y : d(center, y) < r}.
double ball_volume(const MetricMeasureSpace& space, std::size_t center, double r);

/// Ball volumes at radius r for every point of the space.
std::vector<double> ball_volumes(const MetricMeasureSpace& space, double r);

/// Weighted mean of `f` over B(center, r). Throws DegenerateBallError if empty.
double mean_value(const MetricMeasureSpace& space, std::span<const double> f, std::size_t center,
                  double r);

struct DoublingProfile {
  double k_hat = 0.0;
  double alpha_hat = 0.0;
  double a_noncollapse = 0.0;
  double a_caret = 0.0;

  /// k_hat rounded up to a positive integer, used in every constant formula.
  int k() const;
};

/// Sup/inf of sigma(B(s, 2r)) / sigma(B(s, r)) over centers x radii.
///
/// The reverse exponent only uses radii in [reverse_min_radius, diam / 3].
/// a_noncollapse is the smallest unit-ball volume over the given centers.
DoublingProfile estimate_doubling(const MetricMeasureSpace& space,
                                  std::span<const std::size_t> centers,
                                  std::span<const double> radii, double reverse_min_radius = 0.0);

/// Radii at which the doubling ratio around `center` takes every value it can
/// take: one representative per interval between consecutive breakpoints
/// {d(center, y), d(center, y) / 2}.
std::vector<double> critical_radii(const MetricMeasureSpace& space, std::size_t center);

/// estimate_doubling over every point and every critical radius, so k_hat is
/// the exact doubling exponent of the discrete space. The reverse exponent
/// uses radii in [space.resolution(), diam / 3].
DoublingProfile exact_doubling_profile(const MetricMeasureSpace& space);

struct GrowthSample {
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  double r = 0.0;
  double beta = 1.0;
};

/// Ball-growth consequences of doubling, one report per inequality per sample:
///   growth.J  |B(s, beta r)| <= (2 beta)^k |B(s, r)|
///   growth.K  |B(s1, r)| <= 2^k (1 + d(s1, s2) / r)^k |B(s2, r)|
///   growth.Y  inf_s |B(s, r)| >= 2^-k a r^k          (only for r <= 1)
std::vector<VerificationReport> verify_ball_growth(const MetricMeasureSpace& space,
                                                   const DoublingProfile& profile,
                                                   std::span<const GrowthSample> samples,
                                                   std::optional<int> k_override = {});

/// growth.reverse: sigma(B(s, 2r)) >= (1 + 10^-k_hat) sigma(B(s, r)), the
/// constant produced by the connectedness argument. Radii outside
/// [resolution, diam / 3] are skipped.
std::vector<VerificationReport> verify_reverse_doubling(const MetricMeasureSpace& space,
                                                        const DoublingProfile& profile,
                                                        std::span<const GrowthSample> samples);

/// metric.axioms: symmetry and triangle inequality on the given triples.
std::vector<VerificationReport> verify_metric_axioms(
    const MetricMeasureSpace& space, std::span<const std::array<std::size_t, 3>> triples);

/// CSV with header "point,weight".
void write_space_csv(const MetricMeasureSpace& space, std::ostream& out);
MetricMeasureSpace read_space_csv(std::istream& in, MetricKind kind);

}  // namespace heatframe
