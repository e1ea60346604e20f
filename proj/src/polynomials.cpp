#include "heatframe/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "heatframe/errors.hpp"

namespace heatframe {

void JacobiParams::validate() const {
  if (!(gamma > -1.0) || !(alpha > -1.0) || !std::isfinite(gamma) || !std::isfinite(alpha)) {
    throw DomainError("Jacobi exponents must satisfy gamma > -1 and alpha > -1 (got gamma=" +
                      std::to_string(gamma) + ", alpha=" + std::to_string(alpha) + ")");
  }
}

Recurrence jacobi_recurrence(const JacobiParams& params, std::size_t n) {
  params.validate();
  const double a = params.gamma;
  const double b = params.alpha;
  const double ab = a + b;
  Recurrence rec;
  rec.diagonal.resize(n);
  rec.offdiagonal.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i);
    const double s = 2.0 * k + ab;
    rec.diagonal[i] = (i == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (std::size_t i = 1; i <= n; ++i) {
    const double k = static_cast<double>(i);
    const double s = 2.0 * k + ab;
    double b2;
    if (i == 1) {
      // (k + a + b) / (2k + a + b - 1) cancels at k = 1.
      b2 = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    rec.offdiagonal[i - 1] = std::sqrt(b2);
  }
  return rec;
}

double jacobi_weight_mass(const JacobiParams& params) {
  params.validate();
  const double a = params.gamma;
  const double b = params.alpha;
  return std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                  std::lgamma(a + b + 2.0));
}

double jacobi_weight(const JacobiParams& params, double x) {
  return std::pow(1.0 - x, params.gamma) * std::pow(1.0 + x, params.alpha);
}

std::vector<double> orthonormal_values(const JacobiParams& params, std::size_t degree, double x) {
  const Recurrence rec = jacobi_recurrence(params, degree + 1);
  std::vector<double> p(degree + 1);
  p[0] = 1.0 / std::sqrt(jacobi_weight_mass(params));
  if (degree == 0) return p;
  p[1] = (x - rec.diagonal[0]) * p[0] / rec.offdiagonal[0];
  for (std::size_t i = 1; i < degree; ++i) {
    p[i + 1] = ((x - rec.diagonal[i]) * p[i] - rec.offdiagonal[i - 1] * p[i - 1]) /
               rec.offdiagonal[i];
  }
  return p;
}

ValuesAndDerivatives orthonormal_values_and_derivatives(const JacobiParams& params,
                                                        std::size_t degree, double x) {
  const Recurrence rec = jacobi_recurrence(params, degree + 1);
  ValuesAndDerivatives out{std::vector<double>(degree + 1), std::vector<double>(degree + 1, 0.0)};
  auto& p = out.values;
  auto& dp = out.derivatives;
  p[0] = 1.0 / std::sqrt(jacobi_weight_mass(params));
  if (degree == 0) return out;
  p[1] = (x - rec.diagonal[0]) * p[0] / rec.offdiagonal[0];
  dp[1] = p[0] / rec.offdiagonal[0];
  for (std::size_t i = 1; i < degree; ++i) {
    const double bi = rec.offdiagonal[i - 1];
    const double bnext = rec.offdiagonal[i];
    p[i + 1] = ((x - rec.diagonal[i]) * p[i] - bi * p[i - 1]) / bnext;
    dp[i + 1] = (p[i] + (x - rec.diagonal[i]) * dp[i] - bi * dp[i - 1]) / bnext;
  }
  return out;
}

QuadratureRule gauss_jacobi(const JacobiParams& params, std::size_t n) {
  params.validate();
  if (n == 0) throw DomainError("gauss_jacobi: need at least one node");
  const Recurrence rec = jacobi_recurrence(params, n);

  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(rec.diagonal.data(), n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = rec.offdiagonal[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(j)];
    for (int it = 0; it < 3; ++it) {
      const auto vd = orthonormal_values_and_derivatives(params, n, x);
      if (vd.derivatives[n] == 0.0) break;
      const double step = vd.values[n] / vd.derivatives[n];
      const double next = std::clamp(x - step, -1.0, 1.0);
      if (!(std::abs(next - x) < 1e-3)) break;  // keep Golub-Welsch if Newton wanders
      x = next;
    }
    const auto p = orthonormal_values(params, n - 1, x);
    const double christoffel =
        std::accumulate(p.begin(), p.end(), 0.0, [](double acc, double v) { return acc + v * v; });
    rule.nodes[j] = x;
    rule.weights[j] = 1.0 / christoffel;
  }
  return rule;
}

}  // namespace heatframe
