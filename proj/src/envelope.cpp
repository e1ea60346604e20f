#include "heatframe/envelope.hpp"

#include <cmath>
#include <string>

#include "heatframe/errors.hpp"

namespace heatframe {

void EnvelopeParams::validate() const {
  if (!(delta > 0.0)) throw DomainError("envelope scale delta must be positive");
  if (!(sigma_exp > 0.0)) throw DomainError("envelope decay exponent must be positive");
  if (k < 1) throw DomainError("doubling exponent k must be a positive integer");
}

double lemma_a1(int k, double sigma_exp) {
  if (!(sigma_exp > k)) throw DomainError("a1 needs sigma > k");
  return 1.0 / (std::exp2(-k) - std::exp2(-sigma_exp));
}

double lemma_a2(int k, double sigma_exp) {
  if (!(sigma_exp > 2.0 * k)) throw DomainError("a2 needs sigma > 2k");
  return std::exp2(sigma_exp + k + 1.0) / (std::exp2(-k) - std::exp2(k - sigma_exp));
}

double envelope_lp_constant(int k, double sigma_exp, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("L^p exponent must lie in (0, inf)");
  if (!(sigma_exp > k * (0.5 + 1.0 / p))) {
    throw DomainError("envelope L^p bound needs sigma > k (1/2 + 1/p)");
  }
  const double kd = k;
  const double inner = std::exp2(kd * p / 2.0) / (std::exp2(-kd) - std::exp2(-(sigma_exp - kd / 2.0) * p));
  return std::pow(inner, 1.0 / p);
}

EstimateConstants estimate_constants(const EnvelopeParams& params) {
  params.validate();
  return {params.k, params.sigma_exp, lemma_a1(params.k, params.sigma_exp),
          lemma_a2(params.k, params.sigma_exp)};
}

double envelope(const MetricMeasureSpace& space, const EnvelopeParams& params, std::size_t s1,
                std::size_t s2) {
  params.validate();
  const double v1 = ball_volume(space, s1, params.delta);
  const double v2 = ball_volume(space, s2, params.delta);
  if (!(v1 > 0.0) || !(v2 > 0.0)) throw ResolutionError("envelope: empty ball at scale delta");
  return std::pow(v1 * v2, -0.5) *
         std::pow(1.0 + space.distance(s1, s2) / params.delta, -params.sigma_exp);
}

EnvelopeTable::EnvelopeTable(const MetricMeasureSpace& space, const EnvelopeParams& params)
    : space_(&space), params_(params), volumes_(ball_volumes(space, params.delta)) {
  params.validate();
  for (double v : volumes_) {
    if (!(v > 0.0)) throw ResolutionError("envelope: empty ball at scale delta");
  }
}

double EnvelopeTable::operator()(std::size_t s1, std::size_t s2) const {
  return std::pow(volumes_[s1] * volumes_[s2], -0.5) * decay(s1, s2, params_.sigma_exp);
}

double EnvelopeTable::decay(std::size_t s1, std::size_t s2, double exponent) const {
  return std::pow(1.0 + space_->distance(s1, s2) / params_.delta, -exponent);
}

LpNormResult envelope_lp_norm(const MetricMeasureSpace& space, const EnvelopeParams& params,
                              std::size_t s1, double p) {
  params.validate();
  const double a = envelope_lp_constant(params.k, params.sigma_exp, p);
  const EnvelopeTable env(space, params);
  double sum = 0.0;
  for (std::size_t y = 0; y < space.size(); ++y) sum += space.weight(y) * std::pow(env(s1, y), p);
  return {std::pow(sum, 1.0 / p), a * std::pow(env.volume(s1), 1.0 / p - 1.0)};
}

std::vector<VerificationReport> verify_envelope_scaling(const MetricMeasureSpace& space,
                                                        const EnvelopeParams& params, double beta,
                                                        std::span<const PointPair> samples) {
  if (!(beta > 0.0)) throw DomainError("scaling factor beta must be positive");
  const EnvelopeTable base(space, params);
  EnvelopeParams scaled_params = params;
  scaled_params.delta = beta * params.delta;
  const EnvelopeTable scaled(space, scaled_params);
  const double kd = params.k;
  const double sigma = params.sigma_exp;
  const double c17 = std::exp2(kd / 2.0);

  std::vector<VerificationReport> out;
  for (const auto& [s1, s2] : samples) {
    const Context ctx{{"k", kd},   {"sigma", sigma}, {"delta", params.delta},
                      {"beta", beta}, {"s1", static_cast<double>(s1)}, {"s2", static_cast<double>(s2)}};
    const double e = base(s1, s2);
    const double growth = 1.0 + space.distance(s1, s2) / params.delta;
    const double one_volume = c17 / base.volume(s1);
    out.push_back(upper_bound_report("env.eq17", e, one_volume * std::pow(growth, sigma - kd / 2.0),
                                     c17, ctx));
    out.push_back(upper_bound_report("env.eq17.sharp", e,
                                     one_volume * std::pow(growth, -(sigma - kd / 2.0)), c17, ctx));
    const double es = scaled(s1, s2);
    if (beta < 1.0) {
      const double c = std::pow(2.0 / beta, kd);
      out.push_back(upper_bound_report("env.eq18", es, c * e, c, ctx));
    } else {
      const double c = std::pow(beta, sigma);
      out.push_back(upper_bound_report("env.eq19", es, c * e, c, ctx));
    }
  }
  return out;
}

std::vector<VerificationReport> verify_envelope_lp(const MetricMeasureSpace& space,
                                                   const EnvelopeParams& params,
                                                   std::span<const std::size_t> centers,
                                                   std::span<const double> exponents) {
  params.validate();
  const EnvelopeTable env(space, params);
  std::vector<VerificationReport> out;
  for (double p : exponents) {
    if (!(params.sigma_exp > params.k * (0.5 + 1.0 / p))) continue;
    const double a = envelope_lp_constant(params.k, params.sigma_exp, p);
    for (std::size_t s1 : centers) {
      double sum = 0.0;
      for (std::size_t y = 0; y < space.size(); ++y) sum += space.weight(y) * std::pow(env(s1, y), p);
      out.push_back(upper_bound_report(
          "env.lp_norm", std::pow(sum, 1.0 / p), a * std::pow(env.volume(s1), 1.0 / p - 1.0), a,
          {{"p", p}, {"k", static_cast<double>(params.k)}, {"sigma", params.sigma_exp},
           {"delta", params.delta}, {"s1", static_cast<double>(s1)}}));
    }
  }
  return out;
}

std::vector<VerificationReport> verify_lemma_integrals(const MetricMeasureSpace& space,
                                                       const EnvelopeParams& params,
                                                       std::span<const PointPair> samples) {
  params.validate();
  const int k = params.k;
  const double kd = k;
  const double sigma = params.sigma_exp;
  const double a1 = lemma_a1(k, sigma);
  const bool part_c = sigma > 2.0 * kd;
  const double a2 = part_c ? lemma_a2(k, sigma) : 0.0;
  const EnvelopeTable env(space, params);
  const double two_sigma = std::exp2(sigma);
  const double cb = two_sigma * (std::exp2(kd) + 1.0) * a1;

  std::vector<VerificationReport> out;
  for (const auto& [s1, s2] : samples) {
    const Context ctx{{"k", kd}, {"sigma", sigma}, {"delta", params.delta},
                      {"s1", static_cast<double>(s1)}, {"s2", static_cast<double>(s2)}};
    double int_a = 0.0, int_b = 0.0, int_c = 0.0, int_q = 0.0;
    for (std::size_t v = 0; v < space.size(); ++v) {
      const double w = space.weight(v);
      const double d1 = env.decay(s1, v, sigma);
      const double d2 = env.decay(s2, v, sigma);
      int_a += w * d1;
      int_b += w * d1 * d2;
      int_c += w * d1 * d2 / env.volume(v);
      int_q += w * env(s1, v) * env(v, s2);
    }
    const double b1 = env.volume(s1);
    const double b2 = env.volume(s2);
    const double d12 = env.decay(s1, s2, sigma);
    out.push_back(upper_bound_report("lemma.a", int_a, a1 * b1, a1, ctx));
    out.push_back(upper_bound_report("lemma.b.1", int_b, two_sigma * a1 * (b1 + b2) * d12,
                                     two_sigma * a1, ctx));
    out.push_back(upper_bound_report("lemma.b.2", int_b, cb * b1 * env.decay(s1, s2, sigma - kd),
                                     cb, ctx));
    out.push_back(upper_bound_report("lemma.b.3", int_b, cb * b1, cb, ctx));
    if (part_c) {
      out.push_back(upper_bound_report("lemma.c", int_c, a2 * d12, a2, ctx));
      out.push_back(upper_bound_report("env.Q", int_q, a2 * env(s1, s2), a2, ctx));
    }
  }
  return out;
}

}  // namespace heatframe
