#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "heatframe/nets.hpp"

namespace heatframe {

/// Every random draw in the library goes through this engine, seeded once per
/// run. The helpers below avoid std distributions so draws are identical
/// across standard library implementations.
using Rng = std::mt19937_64;

/// Uniform in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

inline std::vector<PointPair> random_pairs(Rng& rng, std::size_t n_points, std::size_t count) {
  std::vector<PointPair> out(count);
  for (auto& p : out) {
    p.s1 = uniform_index(rng, n_points);
    p.s2 = uniform_index(rng, n_points);
  }
  return out;
}

/// Coefficients in [-1, 1] for indices 0..degree, zero-padded to `length`.
inline Eigen::VectorXd random_coefficients(Rng& rng, std::size_t degree, std::size_t length) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(length));
  for (std::size_t i = 0; i <= degree && i < length; ++i) {
    c[static_cast<Eigen::Index>(i)] = uniform(rng, -1.0, 1.0);
  }
  return c;
}

}  // namespace heatframe
