#include "heatframe/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "detail/format.hpp"
#include "detail/parallel.hpp"
#include "heatframe/errors.hpp"

namespace heatframe {

namespace {

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat kernel time must be positive");
}

void require_fit_grid(const SpectralBasis& basis, std::span<const double> t_grid) {
  if (t_grid.empty()) throw SamplingError("empty time grid");
  for (double t : t_grid) {
    if (!(t > 0.0) || t > 1.0) throw DomainError("Gaussian fits need 0 < t <= 1");
  }
  const double t_min = *std::min_element(t_grid.begin(), t_grid.end());
  const double tail =
      std::exp(-basis.eigenvalues()[static_cast<Eigen::Index>(basis.degree())] * t_min);
  if (tail >= kTailTolerance) {
    throw ExactnessError("degree " + std::to_string(basis.degree()) +
                         " leaves a spectral tail of " + std::to_string(tail) + " at t = " +
                         std::to_string(t_min));
  }
}

}  // namespace

HeatKernelEval heat_kernel(const SpectralBasis& basis, double t) {
  require_time(t);
  const Eigen::Index rows = basis.values().rows();
  const Eigen::Index n = basis.values().cols();
  const Eigen::VectorXd damp = (-t * basis.eigenvalues().array()).exp().matrix();
  // Terms below 1e-280 are dropped.
  Eigen::Index live = 0;
  while (live < rows && damp[live] > 1e-280) ++live;
  // Columns of `scaled` are sqrt(exp(-beta t)) P(x_j); entries are dot products.
  const Eigen::MatrixXd scaled =
      damp.head(live).cwiseSqrt().asDiagonal() * basis.values().topRows(live);

  HeatKernelEval out;
  out.t = t;
  out.truncation_degree = basis.degree();
  out.tail_bound = damp[rows - 1];
  out.table.resize(n, n);
  detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i; j < n; ++j) out.table(i, j) = scaled.col(i).dot(scaled.col(j));
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) out.table(i, j) = out.table(j, i);
  }
  return out;
}

Eigen::VectorXd apply_heat(const HeatKernelEval& kernel, const Eigen::VectorXd& weights,
                           const Eigen::VectorXd& f) {
  if (f.size() != kernel.table.cols() || weights.size() != f.size()) {
    throw ContractError("apply_heat: dimension mismatch");
  }
  return kernel.table * weights.cwiseProduct(f);
}

std::size_t degree_for_tail(const JacobiParams& params, double t_min, double tolerance) {
  require_time(t_min);
  const double needed = -std::log(tolerance) / t_min;
  std::size_t n = 0;
  while (!(eigenvalue(n, params) > needed)) ++n;
  return n;
}

VerificationReport verify_markov(const MetricMeasureSpace& space, const HeatKernelEval& kernel) {
  const auto n = static_cast<Eigen::Index>(space.size());
  if (kernel.table.rows() != n) throw ContractError("verify_markov: kernel built on another space");
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(space.weights().data(), n);
  const double defect = ((kernel.table * w).array() - 1.0).abs().maxCoeff();
  return upper_bound_report("heat.markov", defect, 1e-8, 1.0,
                            {{"t", kernel.t}, {"degree", static_cast<double>(kernel.truncation_degree)},
                             {"n_nodes", static_cast<double>(space.size())}});
}

VerificationReport verify_semigroup(const MetricMeasureSpace& space, const SpectralBasis& basis,
                                    double t, double s) {
  require_time(t);
  require_time(s);
  const auto ht = heat_kernel(basis, t);
  const auto hs = heat_kernel(basis, s);
  const auto hts = heat_kernel(basis, t + s);
  const Eigen::MatrixXd composed = ht.table * basis.weights().asDiagonal() * hs.table;
  const double scale = hts.table.cwiseAbs().maxCoeff();
  const double defect = (hts.table - composed).cwiseAbs().maxCoeff() / scale;
  return upper_bound_report("heat.semigroup", defect, 1e-7, 0.0,
                            {{"t", t}, {"s", s}, {"n_nodes", static_cast<double>(space.size())}});
}

VerificationReport verify_eigen_action(const SpectralBasis& basis, double t, std::size_t i_max) {
  if (i_max > basis.degree()) throw DomainError("verify_eigen_action: index above basis degree");
  const auto kernel = heat_kernel(basis, t);
  double worst = 0.0;
  for (std::size_t i = 0; i <= i_max; ++i) {
    const Eigen::VectorXd p = basis.values().row(static_cast<Eigen::Index>(i)).transpose();
    const Eigen::VectorXd rp = apply_heat(kernel, basis.weights(), p);
    const double factor = std::exp(-basis.eigenvalues()[static_cast<Eigen::Index>(i)] * t);
    worst = std::max(worst, (rp - factor * p).cwiseAbs().maxCoeff());
  }
  return upper_bound_report("heat.eigen_action", worst, 1e-9, 0.0,
                            {{"t", t}, {"i_max", static_cast<double>(i_max)}});
}

std::vector<VerificationReport> verify_contraction(const SpectralBasis& basis,
                                                   const HeatKernelEval& kernel,
                                                   std::span<const Eigen::VectorXd> trials) {
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& f = trials[i];
    if (f.minCoeff() < 0.0 || f.maxCoeff() > 1.0) {
      throw DomainError("contraction trials must take values in [0, 1]");
    }
    const Eigen::VectorXd rf = apply_heat(kernel, basis.weights(), f);
    const Context ctx{{"t", kernel.t}, {"trial", static_cast<double>(i)}};
    out.push_back(lower_bound_report("heat.contraction", rf.minCoeff(), -1e-9, 0.0, ctx));
    out.push_back(upper_bound_report("heat.contraction", rf.maxCoeff(), 1.0 + 1e-9, 1.0, ctx));
  }
  return out;
}

FitReport GaussianFit::report() const {
  FitReport r;
  r.bound_id = "fit.gaussian";
  r.fitted_constants = {{"K", K}, {"a", a}, {"c1_prime", c1_prime}, {"c1", c1}};
  r.n_samples = n_samples;
  r.max_margin = max_margin;
  r.stable = std::isfinite(K) && std::isfinite(a) && std::isfinite(c1_prime) && std::isfinite(c1) &&
             min_rho > 0.0;
  return r;
}

GaussianFit fit_gaussian_bounds(const MetricMeasureSpace& space, const SpectralBasis& basis,
                                std::span<const double> t_grid,
                                std::span<const CoordinatePair> pairs) {
  require_fit_grid(basis, t_grid);
  if (pairs.empty()) throw SamplingError("fit_gaussian_bounds: no sample pairs");

  struct Sample {
    double u;  // d^2 / t
    double rho;
    bool diagonal;
  };
  std::vector<Sample> samples;
  for (double t : t_grid) {
    const auto kernel = heat_kernel(basis, t);
    const auto vol = ball_volumes(space, std::sqrt(t));
    const auto add = [&](std::size_t i, std::size_t j) {
      const double d = space.distance(i, j);
      const double u = d * d / t;
      if (u > kGaussianFitRange) return;
      const double rho = kernel.table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                         std::sqrt(vol[i] * vol[j]);
      samples.push_back({u, rho, i == j});
    };
    for (const auto& p : pairs) {
      const std::size_t i = space.nearest_index(p.x);
      const std::size_t j = space.nearest_index(p.y);
      add(i, i);
      if (i != j) add(i, j);
    }
  }

  GaussianFit fit;
  fit.n_samples = samples.size();
  double max_rho = -std::numeric_limits<double>::infinity();
  double min_rho = std::numeric_limits<double>::infinity();
  double min_diag = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    max_rho = std::max(max_rho, s.rho);
    min_rho = std::min(min_rho, s.rho);
    if (s.diagonal) min_diag = std::min(min_diag, s.rho);
  }
  fit.min_rho = min_rho;
  fit.K = kGaussianFitSlack * max_rho;
  fit.c1_prime = min_diag / kGaussianFitSlack;

  // Largest a with rho <= K exp(-a u); smallest c1 with rho >= c1' exp(-c1 u).
  fit.a = std::numeric_limits<double>::infinity();
  fit.c1 = 0.0;
  for (const auto& s : samples) {
    if (s.u <= 0.0) continue;
    if (s.rho > 0.0) {
      fit.a = std::min(fit.a, std::log(fit.K / s.rho) / s.u);
      fit.c1 = std::max(fit.c1, std::log(fit.c1_prime / s.rho) / s.u);
    } else {
      fit.c1 = std::numeric_limits<double>::infinity();
    }
  }
  if (!std::isfinite(fit.a)) fit.a = std::numeric_limits<double>::quiet_NaN();

  for (const auto& s : samples) {
    const double bound = fit.K * std::exp(-fit.a * s.u);
    if (bound > 0.0) fit.max_margin = std::max(fit.max_margin, 1.0 - s.rho / bound);
  }
  return fit;
}

FitReport fit_holder(const MetricMeasureSpace& space, const SpectralBasis& basis,
                     std::span<const double> t_grid, std::span<const HolderTriple> triples,
                     const GaussianFit& gaussian) {
  require_fit_grid(basis, t_grid);
  struct Sample {
    double scaled;  // |h(s1,s2) - h(s1,s2')| / G_t(s1, s2) without K
    double u;       // d(s2, s2') / sqrt(t)
  };
  std::vector<Sample> samples;
  for (double t : t_grid) {
    const auto kernel = heat_kernel(basis, t);
    const auto vol = ball_volumes(space, std::sqrt(t));
    const double root_t = std::sqrt(t);
    for (const auto& tr : triples) {
      const std::size_t s1 = space.nearest_index(tr.s1);
      const std::size_t s2 = space.nearest_index(tr.s2);
      const std::size_t s2p = space.nearest_index(tr.s2_prime);
      const double step = space.distance(s2, s2p);
      if (s2 == s2p || step > root_t) continue;
      const double d12 = space.distance(s1, s2);
      if (d12 * d12 / t > kGaussianFitRange) continue;
      const double lhs = std::abs(
          kernel.table(static_cast<Eigen::Index>(s1), static_cast<Eigen::Index>(s2)) -
          kernel.table(static_cast<Eigen::Index>(s1), static_cast<Eigen::Index>(s2p)));
      const double envelope = std::exp(-gaussian.a * d12 * d12 / t) / std::sqrt(vol[s1] * vol[s2]);
      samples.push_back({lhs / envelope, step / root_t});
    }
  }
  if (samples.empty()) throw SamplingError("fit_holder: no triple with 0 < d(s2, s2') <= sqrt(t)");
  double peak = 0.0;
  for (const auto& s : samples) peak = std::max(peak, s.scaled);
  const double K = kGaussianFitSlack * peak;
  double gamma = std::numeric_limits<double>::infinity();
  double slack = 0.0;
  for (const auto& s : samples) {
    if (K > 0.0 && s.scaled > 0.0 && s.u < 1.0) {
      gamma = std::min(gamma, std::log(s.scaled / K) / std::log(s.u));
    }
  }
  if (std::isfinite(gamma)) {
    for (const auto& s : samples) {
      if (K > 0.0) slack = std::max(slack, 1.0 - s.scaled / (K * std::pow(s.u, gamma)));
    }
  }
  FitReport fit;
  fit.bound_id = "fit.holder";
  fit.n_samples = samples.size();
  fit.fitted_constants["gamma_H"] = gamma;
  fit.fitted_constants["K"] = K;
  fit.max_margin = slack;
  fit.stable = std::isfinite(gamma) && gamma > 0.0 && std::isfinite(K);
  return fit;
}

void write_kernel_csv(const HeatKernelEval& kernel, std::ostream& out) {
  out << "x_index,y_index,value\n";
  for (Eigen::Index i = 0; i < kernel.table.rows(); ++i) {
    for (Eigen::Index j = 0; j < kernel.table.cols(); ++j) {
      out << i << ',' << j << ',' << detail::format_double(kernel.table(i, j)) << '\n';
    }
  }
}

}  // namespace heatframe
