#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "heatframe/geometry.hpp"
#include "heatframe/reporting.hpp"

namespace heatframe {

/// A maximal delta-net (centers are point indices of the owning space) and,
/// once partitioned, the cell P_iota each point belongs to.
struct Net {
  double delta = 0.0;
  std::vector<std::size_t> centers;
  /// assignment[point] = position of the cell's center in `centers`.
  /// Empty until build_partition runs.
  std::vector<std::size_t> assignment;

  bool partitioned() const { return !assignment.empty(); }
  /// Sum of point weights in each cell.
  std::vector<double> cell_masses(const MetricMeasureSpace& space) const;
};

/// Greedy sweep in stored point order: a point joins when it is at distance
/// >= delta from every center admitted so far. Maximal over the candidates.
Net build_maximal_net(const MetricMeasureSpace& space, double delta);

/// Inductive partition. Cells are filled in center order with the points of
/// B(iota_j, delta) that are unassigned and outside every other B(rho, delta/2);
/// anything left over joins its nearest center (earlier center on ties).
///
/// Throws ContractError if `net` is not a maximal delta-net of `space`.
Net build_partition(const MetricMeasureSpace& space, Net net);

/// net.separation, net.covering, net.sandwich and net.mass reports.
std::vector<VerificationReport> verify_net_invariants(const MetricMeasureSpace& space,
                                                      const Net& net);

struct PointPair {
  std::size_t s1 = 0;
  std::size_t s2 = 0;
};

/// The five net sums, evaluated at every sample pair (R, S and T at s1):
///   thm.sum.R  sum |P| (1 + d(s, i)/delta)^(-k-1)           <= 2^(2k+2) |B(s, delta)|
///   thm.sum.S  sum (1 + d(s, i)/delta)^(-2k-1)              <= 2^(3k+2)
///   thm.sum.T  sum |P| / |B(i, d*)| (1 + d(s, i)/d*)^(-2k-1) <= 2^(3k+2)
///   thm.sum.U  sum |P| E_{d*}(s1, i) E_{d*}(s2, i)          <= 2^(sigma+3k+3) E_{d*}(s1, s2)
///   thm.sum.V  sum (1+d(s1,i)/delta)^-sigma (1+d(s2,i)/delta)^-sigma
///                                          <= 2^(sigma+2k+3) (1 + d(s1, s2)/delta)^-sigma
/// U and V are only emitted when sigma_exp >= 2k + 1.
std::vector<VerificationReport> verify_net_sums(const MetricMeasureSpace& space, const Net& net,
                                                std::span<const PointPair> samples,
                                                double delta_star, double sigma_exp, int k);

void to_json(nlohmann::json& j, const Net& net);
void from_json(const nlohmann::json& j, Net& net);

/// CSV with header "center_index,point,cell_mass" (one row per center).
void write_net_csv(const MetricMeasureSpace& space, const Net& net, std::ostream& out);

}  // namespace heatframe
