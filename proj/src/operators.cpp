#include "heatframe/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "detail/format.hpp"
#include "heatframe/errors.hpp"

namespace heatframe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd weights_of(const MetricMeasureSpace& space) {
  return Eigen::Map<const Eigen::VectorXd>(space.weights().data(),
                                           static_cast<Eigen::Index>(space.size()));
}

void require_square(const MetricMeasureSpace& space, const Eigen::MatrixXd& table) {
  const auto n = static_cast<Eigen::Index>(space.size());
  if (table.rows() != n || table.cols() != n) {
    throw ContractError("kernel table does not match the space size");
  }
}

// Weighted L^r norm of a row/column of kernel values.
template <typename Vec>
double weighted_norm(const Eigen::VectorXd& w, const Vec& v, double r) {
  if (std::isinf(r)) return v.cwiseAbs().maxCoeff();
  return std::pow((w.array() * v.array().abs().pow(r)).sum(), 1.0 / r);
}

}  // namespace

KernelOperator KernelOperator::dominated(const MetricMeasureSpace& space, Eigen::MatrixXd table,
                                         const DominationCertificate& certificate) {
  require_square(space, table);
  const EnvelopeTable env(space, certificate.params);
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = 0; j < space.size(); ++j) {
      const double h = std::abs(table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      const double bound = certificate.a_prime * env(i, j);
      if (h > bound * (1.0 + kMarginTolerance)) {
        throw ContractError("domination certificate fails at node pair (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
      }
    }
  }
  KernelOperator op(std::move(table));
  op.domination_ = certificate;
  return op;
}

double fit_domination(const MetricMeasureSpace& space, const Eigen::MatrixXd& table,
                      const EnvelopeParams& params) {
  require_square(space, table);
  const EnvelopeTable env(space, params);
  double a = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = 0; j < space.size(); ++j) {
      a = std::max(a, std::abs(table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) /
                          env(i, j));
    }
  }
  return a;
}

Eigen::VectorXd apply_operator(const MetricMeasureSpace& space, const KernelOperator& op,
                               const Eigen::VectorXd& f) {
  require_square(space, op.table());
  if (f.size() != op.table().rows()) throw ContractError("apply_operator: dimension mismatch");
  return op.table().transpose() * weights_of(space).cwiseProduct(f);
}

double lp_norm(const MetricMeasureSpace& space, const Eigen::VectorXd& f, double p) {
  if (!(p > 0.0)) throw DomainError("L^p exponent must be positive");
  return weighted_norm(weights_of(space), f, p);
}

double young_exponent(double p, double q) {
  if (!(p >= 1.0) || !(q >= p)) throw DomainError("Young exponents need 1 <= p <= q <= inf");
  const double inv_r = 1.0 - 1.0 / p + 1.0 / q;
  return inv_r > 0.0 ? 1.0 / inv_r : kInf;
}

double young_constant(const DominationCertificate& certificate, double a_noncollapse, double p,
                      double q) {
  const double r = young_exponent(p, q);
  const double kd = certificate.params.k;
  const double a_caret = std::exp2(-kd) * a_noncollapse;
  return certificate.a_prime * std::pow(a_caret, kd * (1.0 / r - 1.0)) * std::exp2(2.0 * kd + 1.0);
}

std::vector<VerificationReport> verify_young(const MetricMeasureSpace& space,
                                             const KernelOperator& op,
                                             const DoublingProfile& profile, double p, double q,
                                             std::span<const Eigen::VectorXd> trials) {
  if (!op.domination()) throw ContractError("verify_young needs a domination certificate");
  const auto& cert = *op.domination();
  const auto& params = cert.params;
  if (params.sigma_exp < 2.0 * params.k + 1.0) throw DomainError("Young bound needs sigma >= 2k + 1");
  if (params.delta > 1.0) throw DomainError("Young bound needs delta <= 1");
  const double a = young_constant(cert, profile.a_noncollapse, p, q);
  const double kd = params.k;
  const double scale = std::pow(params.delta, kd * (1.0 / q - 1.0 / p));
  std::vector<VerificationReport> out;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const Eigen::VectorXd hf = apply_operator(space, op, trials[t]);
    const double fp = lp_norm(space, trials[t], p);
    out.push_back(upper_bound_report(
        "young", lp_norm(space, hf, q), a * scale * fp, a,
        {{"p", p}, {"q", q}, {"r", young_exponent(p, q)}, {"k", kd}, {"delta", params.delta},
         {"sigma", params.sigma_exp}, {"a_prime", cert.a_prime}, {"trial", static_cast<double>(t)},
         {"ratio", fp > 0.0 ? lp_norm(space, hf, q) / fp : 0.0}}));
  }
  return out;
}

double schur_constant(const MetricMeasureSpace& space, const Eigen::MatrixXd& table, double r) {
  require_square(space, table);
  const Eigen::VectorXd w = weights_of(space);
  double c = 0.0;
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    c = std::max(c, weighted_norm(w, table.row(i).transpose(), r));
    c = std::max(c, weighted_norm(w, table.col(i), r));
  }
  return c;
}

std::vector<VerificationReport> verify_schur(const MetricMeasureSpace& space,
                                             const KernelOperator& op, double p, double q,
                                             std::span<const Eigen::VectorXd> trials) {
  const double r = young_exponent(p, q);
  const double c = schur_constant(space, op.table(), r);
  std::vector<VerificationReport> out;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const Eigen::VectorXd hf = apply_operator(space, op, trials[t]);
    out.push_back(upper_bound_report("schur", lp_norm(space, hf, q), c * lp_norm(space, trials[t], p),
                                     c, {{"p", p}, {"q", q}, {"r", r}, {"trial", static_cast<double>(t)}}));
  }
  return out;
}

KernelOperator spectral_multiplier(const SpectralBasis& basis,
                                   const std::function<double(double)>& multiplier) {
  const Eigen::Index rows = basis.values().rows();
  Eigen::VectorXd m(rows);
  for (Eigen::Index i = 0; i < rows; ++i) m[i] = multiplier(basis.eigenvalues()[i]);
  return KernelOperator(basis.values().transpose() * m.asDiagonal() * basis.values());
}

std::vector<VerificationReport> verify_multiplier_commute(
    const MetricMeasureSpace& space, const SpectralBasis& basis,
    const std::function<double(double)>& m1, const std::function<double(double)>& m2,
    std::span<const Eigen::VectorXd> trials) {
  const auto op1 = spectral_multiplier(basis, m1);
  const auto op2 = spectral_multiplier(basis, m2);
  const auto op12 = spectral_multiplier(basis, [&](double b) { return m1(b) * m2(b); });
  std::vector<VerificationReport> out;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const Eigen::VectorXd chained = apply_operator(space, op2, apply_operator(space, op1, trials[t]));
    const Eigen::VectorXd direct = apply_operator(space, op12, trials[t]);
    out.push_back(upper_bound_report("multiplier.commute", (chained - direct).cwiseAbs().maxCoeff(),
                                     1e-9, 0.0, {{"trial", static_cast<double>(t)}}));
  }
  return out;
}

std::vector<BandBlock> band_blocks(const SpectralBasis& basis) {
  std::vector<BandBlock> blocks{{0, 0, 0}};
  for (std::size_t i = 1; i <= basis.degree(); ++i) {
    const double beta = basis.eigenvalues()[static_cast<Eigen::Index>(i)];
    int j = 1;
    while (beta > std::exp2(2.0 * j)) ++j;
    if (blocks.back().j == j) {
      blocks.back().last = i;
    } else {
      blocks.push_back({j, i, i});
    }
  }
  return blocks;
}

BandDecomposition band_decompose(const MetricMeasureSpace& space, const SpectralBasis& basis,
                                 const Net& net, const Eigen::VectorXd& f) {
  if (basis.n_nodes() != space.size()) throw ContractError("basis and space differ in size");
  if (!net.partitioned() || net.assignment.size() != space.size()) {
    throw ContractError("band_decompose needs a net partitioned on this space");
  }
  if (static_cast<std::size_t>(f.size()) != space.size()) {
    throw ContractError("band_decompose: f has the wrong length");
  }
  const auto masses = net.cell_masses(space);
  const Eigen::VectorXd w = weights_of(space);

  BandDecomposition out;
  out.blocks = band_blocks(basis);
  out.reconstruction = Eigen::VectorXd::Zero(f.size());
  out.frame_ratio = 1.0;
  const Eigen::VectorXd coeffs_all = basis.values() * w.cwiseProduct(f);
  for (const auto& block : out.blocks) {
    const auto first = static_cast<Eigen::Index>(block.first);
    const auto count = static_cast<Eigen::Index>(block.last - block.first + 1);
    Eigen::VectorXd q =
        basis.values().middleRows(first, count).transpose() * coeffs_all.segment(first, count);
    const double energy = (w.array() * q.array().square()).sum();
    std::vector<double> coeffs(net.centers.size());
    double sampled = 0.0;
    for (std::size_t c = 0; c < net.centers.size(); ++c) {
      coeffs[c] = std::sqrt(masses[c]) * q[static_cast<Eigen::Index>(net.centers[c])];
      sampled += coeffs[c] * coeffs[c];
    }
    if (energy > 1e-24) {
      const double ratio = sampled / energy;
      out.frame_ratio = std::max({out.frame_ratio, ratio, ratio > 0.0 ? 1.0 / ratio : kInf});
    }
    out.reconstruction += q;
    out.block_energies.push_back(energy);
    out.net_coefficients.push_back(std::move(coeffs));
    out.components.push_back(std::move(q));
  }
  return out;
}

std::vector<VerificationReport> verify_band(const MetricMeasureSpace& space,
                                            const BandDecomposition& decomposition,
                                            const Eigen::VectorXd& f) {
  const Eigen::VectorXd w = weights_of(space);
  double total = 0.0;
  for (double e : decomposition.block_energies) total += e;
  const double norm2 = (w.array() * f.array().square()).sum();
  const double energy_scale = std::max(1.0, norm2);
  const double value_scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  std::vector<VerificationReport> out;
  const Context ctx{{"blocks", static_cast<double>(decomposition.blocks.size())}, {"norm2", norm2}};
  out.push_back(
      upper_bound_report("band.parseval", std::abs(total - norm2), 1e-10 * energy_scale, 0.0, ctx));
  out.push_back(upper_bound_report("band.reconstruction",
                                   (decomposition.reconstruction - f).cwiseAbs().maxCoeff(),
                                   1e-10 * value_scale, 0.0, ctx));
  double cross = 0.0;
  const auto& comps = decomposition.components;
  for (std::size_t a = 0; a < comps.size(); ++a) {
    for (std::size_t b = a + 1; b < comps.size(); ++b) {
      cross = std::max(cross, std::abs((w.array() * comps[a].array() * comps[b].array()).sum()));
    }
  }
  out.push_back(upper_bound_report("band.orthogonality", cross, 1e-10 * energy_scale, 0.0, ctx));
  return out;
}

FitReport frame_bounds_report(const BandDecomposition& decomposition) {
  FitReport r;
  r.bound_id = "fit.frame_bounds";
  r.fitted_constants = {{"F", decomposition.frame_ratio}};
  r.n_samples = decomposition.blocks.size();
  r.stable = std::isfinite(decomposition.frame_ratio);
  return r;
}

void write_decomposition_csv(const BandDecomposition& decomposition, const Net& net,
                             std::ostream& out) {
  out << "j,center_index,coefficient\n";
  for (std::size_t b = 0; b < decomposition.blocks.size(); ++b) {
    for (std::size_t c = 0; c < net.centers.size(); ++c) {
      out << decomposition.blocks[b].j << ',' << net.centers[c] << ','
          << detail::format_double(decomposition.net_coefficients[b][c]) << '\n';
    }
  }
}

void to_json(nlohmann::json& j, const BandDecomposition& decomposition) {
  auto blocks = nlohmann::json::array();
  for (std::size_t b = 0; b < decomposition.blocks.size(); ++b) {
    const auto& blk = decomposition.blocks[b];
    blocks.push_back({{"j", blk.j},
                      {"first", blk.first},
                      {"last", blk.last},
                      {"energy", decomposition.block_energies[b]}});
  }
  j = nlohmann::json{{"blocks", blocks}, {"frame_ratio", decomposition.frame_ratio}};
}

}  // namespace heatframe
