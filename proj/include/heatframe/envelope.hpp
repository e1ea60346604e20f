#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "heatframe/geometry.hpp"
#include "heatframe/nets.hpp"
#include "heatframe/reporting.hpp"

namespace heatframe {

/// Scale delta, decay exponent sigma and doubling exponent k of the envelope
///   E(s1, s2) = (|B(s1, delta)| |B(s2, delta)|)^(-1/2) (1 + d(s1, s2) / delta)^(-sigma).
struct EnvelopeParams {
  double delta = 0.0;
  double sigma_exp = 0.0;
  int k = 1;

  void validate() const;
  /// Smallest decay admitted by the Young bound.
  static double default_sigma(int k) { return 2.0 * k + 1.0; }
};

/// (2^-k - 2^-sigma)^-1; needs sigma > k.
double lemma_a1(int k, double sigma_exp);
/// 2^(sigma+k+1) / (2^-k - 2^(k-sigma)); needs sigma > 2k.
double lemma_a2(int k, double sigma_exp);
/// (2^(kp/2) / (2^-k - 2^(-(sigma - k/2) p)))^(1/p); needs sigma > k (1/2 + 1/p).
double envelope_lp_constant(int k, double sigma_exp, double p);

struct EstimateConstants {
  int k = 1;
  double sigma_exp = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  double a_p(double p) const { return envelope_lp_constant(k, sigma_exp, p); }
};

/// Throws DomainError if sigma <= 2k (a2 would be undefined).
EstimateConstants estimate_constants(const EnvelopeParams& params);

/// Envelope value; throws ResolutionError when a ball at scale delta is empty.
double envelope(const MetricMeasureSpace& space, const EnvelopeParams& params, std::size_t s1,
                std::size_t s2);

/// Envelope with the ball volumes at scale delta computed once.
class EnvelopeTable {
 public:
  EnvelopeTable(const MetricMeasureSpace& space, const EnvelopeParams& params);

  double operator()(std::size_t s1, std::size_t s2) const;
  double volume(std::size_t s) const { return volumes_[s]; }
  /// (1 + d / delta)^-exponent
  double decay(std::size_t s1, std::size_t s2, double exponent) const;
  const EnvelopeParams& params() const { return params_; }

 private:
  const MetricMeasureSpace* space_;
  EnvelopeParams params_;
  std::vector<double> volumes_;
};

struct LpNormResult {
  double norm = 0.0;
  /// a(p) |B(s1, delta)|^(1/p - 1)
  double bound = 0.0;
};

/// (sum_y w_y E(s1, y)^p)^(1/p) and its closed-form bound.
LpNormResult envelope_lp_norm(const MetricMeasureSpace& space, const EnvelopeParams& params,
                              std::size_t s1, double p);

/// Pointwise envelope algebra on sample pairs:
///   env.eq17        E <= 2^(k/2) |B(s1)|^-1 (1 + d/delta)^(sigma - k/2)   (exponent as printed)
///   env.eq17.sharp  E <= 2^(k/2) |B(s1)|^-1 (1 + d/delta)^-(sigma - k/2)
///   env.eq18        E_{beta delta} <= (2/beta)^k E_delta               (beta < 1)
///   env.eq19        E_{beta delta} <= beta^sigma E_delta               (beta >= 1)
std::vector<VerificationReport> verify_envelope_scaling(const MetricMeasureSpace& space,
                                                        const EnvelopeParams& params, double beta,
                                                        std::span<const PointPair> samples);

/// env.lp_norm at every center and exponent with sigma > k (1/2 + 1/p).
std::vector<VerificationReport> verify_envelope_lp(const MetricMeasureSpace& space,
                                                   const EnvelopeParams& params,
                                                   std::span<const std::size_t> centers,
                                                   std::span<const double> exponents);

/// Integral lemma on sample pairs:
///   lemma.a    int (1 + d(s1,y)/delta)^-sigma            <= a1 |B(s1)|
///   lemma.b.1  int decay(s1,v) decay(s2,v)               <= 2^sigma a1 (|B(s1)| + |B(s2)|) decay(s1,s2)
///   lemma.b.2                                            <= 2^sigma (2^k+1) a1 |B(s1)| (1+d/delta)^-(sigma-k)
///   lemma.b.3                                            <= 2^sigma (2^k+1) a1 |B(s1)|
///   lemma.c    int decay(s1,v) decay(s2,v) / |B(v)|      <= a2 decay(s1,s2)
///   env.Q      int E(s1,v) E(v,s2)                       <= a2 E(s1,s2)
/// Parts a and b need sigma > k (DomainError otherwise); c and Q are skipped
/// unless sigma > 2k.
std::vector<VerificationReport> verify_lemma_integrals(const MetricMeasureSpace& space,
                                                       const EnvelopeParams& params,
                                                       std::span<const PointPair> samples);

}  // namespace heatframe
