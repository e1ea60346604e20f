#pragma once

#include <cstddef>
#include <vector>

namespace heatframe {

/// Exponents of the Jacobi weight w(x) = (1 - x)^gamma (1 + x)^alpha on [-1, 1].
struct JacobiParams {
  double gamma = 0.0;
  double alpha = 0.0;

  /// Throws DomainError unless gamma > -1 and alpha > -1.
  void validate() const;
};

/// Coefficients of x p_i = b_{i+1} p_{i+1} + a_i p_i + b_i p_{i-1} for the
/// polynomials orthonormal with respect to w(x) dx.
struct Recurrence {
  std::vector<double> diagonal;     // a_0 .. a_{n-1}
  std::vector<double> offdiagonal;  // b_1 .. b_n
};

Recurrence jacobi_recurrence(const JacobiParams& params, std::size_t n);

/// Integral of the Jacobi weight over [-1, 1].
double jacobi_weight_mass(const JacobiParams& params);

double jacobi_weight(const JacobiParams& params, double x);

/// Orthonormal values p_0(x) .. p_degree(x), leading coefficients positive.
std::vector<double> orthonormal_values(const JacobiParams& params, std::size_t degree, double x);

struct ValuesAndDerivatives {
  std::vector<double> values;
  std::vector<double> derivatives;
};

/// Values and first derivatives from the differentiated three-term recurrence.
ValuesAndDerivatives orthonormal_values_and_derivatives(const JacobiParams& params,
                                                        std::size_t degree, double x);

struct QuadratureRule {
  std::vector<double> nodes;  // ascending
  std::vector<double> weights;
};

/// n-point Gauss-Jacobi rule, exact for polynomials of degree <= 2n - 1.
///
/// Nodes start from the Golub-Welsch eigenvalues and are polished with Newton
/// steps on p_n; weights come from the Christoffel function 1 / sum_i p_i(x)^2.
QuadratureRule gauss_jacobi(const JacobiParams& params, std::size_t n);

}  // namespace heatframe
