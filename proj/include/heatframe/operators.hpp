#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "heatframe/envelope.hpp"
#include "heatframe/geometry.hpp"
#include "heatframe/jacobi.hpp"
#include "heatframe/nets.hpp"
#include "heatframe/reporting.hpp"

namespace heatframe {

/// |H(x, y)| <= a_prime E_{delta, sigma}(x, y) at every node pair.
struct DominationCertificate {
  double a_prime = 0.0;
  EnvelopeParams params;
};

/// Integral operator (Hf)(s2) = int H(s1, s2) f(s1) dsigma(s1), sampled on the
/// nodes of a space.
class KernelOperator {
 public:
  KernelOperator() = default;
  explicit KernelOperator(Eigen::MatrixXd table) : table_(std::move(table)) {}

  /// Checks the certificate at every node pair; ContractError if it fails.
  static KernelOperator dominated(const MetricMeasureSpace& space, Eigen::MatrixXd table,
                                  const DominationCertificate& certificate);

  const Eigen::MatrixXd& table() const { return table_; }
  const std::optional<DominationCertificate>& domination() const { return domination_; }

 private:
  Eigen::MatrixXd table_;
  std::optional<DominationCertificate> domination_;
};

/// Smallest a' with |H| <= a' E on the nodes.
double fit_domination(const MetricMeasureSpace& space, const Eigen::MatrixXd& table,
                      const EnvelopeParams& params);

Eigen::VectorXd apply_operator(const MetricMeasureSpace& space, const KernelOperator& op,
                               const Eigen::VectorXd& f);

/// Weighted L^p norm; p may be +infinity.
double lp_norm(const MetricMeasureSpace& space, const Eigen::VectorXd& f, double p);

/// r with 1/p - 1/q = 1 - 1/r (may be +infinity).
double young_exponent(double p, double q);

/// a' ahat^(k (1/r - 1)) 2^(2k+1) with ahat = 2^-k a_noncollapse.
double young_constant(const DominationCertificate& certificate, double a_noncollapse, double p,
                      double q);

/// young: ||Hf||_q <= a delta^(k (1/q - 1/p)) ||f||_p, one report per trial.
/// Needs 1 <= p <= q <= inf, a domination certificate (ContractError),
/// sigma >= 2k + 1 and delta <= 1 (DomainError).
std::vector<VerificationReport> verify_young(const MetricMeasureSpace& space,
                                             const KernelOperator& op,
                                             const DoublingProfile& profile, double p, double q,
                                             std::span<const Eigen::VectorXd> trials);

/// Largest weighted L^r norm over the rows and columns of the kernel.
double schur_constant(const MetricMeasureSpace& space, const Eigen::MatrixXd& table, double r);

/// schur: ||Hf||_q <= C ||f||_p with C = schur_constant(r), one report per trial.
std::vector<VerificationReport> verify_schur(const MetricMeasureSpace& space,
                                             const KernelOperator& op, double p, double q,
                                             std::span<const Eigen::VectorXd> trials);

/// Kernel sum_i m(beta_i) P_i(x) P_i(y).
KernelOperator spectral_multiplier(const SpectralBasis& basis,
                                   const std::function<double(double)>& multiplier);

/// multiplier.commute: m2(m1 f) vs (m1 m2) f, max error <= 1e-9 per trial.
std::vector<VerificationReport> verify_multiplier_commute(
    const MetricMeasureSpace& space, const SpectralBasis& basis,
    const std::function<double(double)>& m1, const std::function<double(double)>& m2,
    std::span<const Eigen::VectorXd> trials);

/// Basis indices [first, last] of dyadic block j: beta_0 alone in block 0,
/// and for i >= 1 the smallest j >= 1 with beta_i <= 4^j.
struct BandBlock {
  int j = 0;
  std::size_t first = 0;
  std::size_t last = 0;
};

std::vector<BandBlock> band_blocks(const SpectralBasis& basis);

struct BandDecomposition {
  std::vector<BandBlock> blocks;
  std::vector<double> block_energies;
  /// Per block, sqrt(|P_iota|) (Q_j f)(iota) at every net center.
  std::vector<std::vector<double>> net_coefficients;
  std::vector<Eigen::VectorXd> components;
  Eigen::VectorXd reconstruction;
  /// max over nonzero blocks of max(F_j, 1/F_j), F_j = sum_iota c^2 / ||Q_j f||^2.
  double frame_ratio = 0.0;
};

/// ContractError if the net is not partitioned on `space`.
BandDecomposition band_decompose(const MetricMeasureSpace& space, const SpectralBasis& basis,
                                 const Net& net, const Eigen::VectorXd& f);

/// band.parseval, band.reconstruction and band.orthogonality, each within
/// 1e-10 times max(1, ||f||_2^2) (max(1, ||f||_inf) for reconstruction).
std::vector<VerificationReport> verify_band(const MetricMeasureSpace& space,
                                            const BandDecomposition& decomposition,
                                            const Eigen::VectorXd& f);

/// fit.frame_bounds with constant {"F"}.
FitReport frame_bounds_report(const BandDecomposition& decomposition);

/// CSV with header "j,center_index,coefficient".
void write_decomposition_csv(const BandDecomposition& decomposition, const Net& net,
                             std::ostream& out);

/// Block-energy summary: {"blocks": [{j, first, last, energy}], "frame_ratio"}.
void to_json(nlohmann::json& j, const BandDecomposition& decomposition);

}  // namespace heatframe
