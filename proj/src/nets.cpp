#include "heatframe/nets.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "detail/format.hpp"
#include "heatframe/errors.hpp"

namespace heatframe {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

double decay(double d, double scale, double exponent) {
  return std::pow(1.0 + d / scale, -exponent);
}

}  // namespace

std::vector<double> Net::cell_masses(const MetricMeasureSpace& space) const {
  if (assignment.size() != space.size()) throw ContractError("net is not partitioned on this space");
  std::vector<double> mass(centers.size(), 0.0);
  for (std::size_t p = 0; p < assignment.size(); ++p) mass.at(assignment[p]) += space.weight(p);
  return mass;
}

Net build_maximal_net(const MetricMeasureSpace& space, double delta) {
  if (!(delta > 0.0)) throw DomainError("net spacing delta must be positive");
  if (space.size() == 0) throw DomainError("cannot build a net on an empty space");
  Net net;
  net.delta = delta;
  for (std::size_t p = 0; p < space.size(); ++p) {
    bool admitted = true;
    for (std::size_t c : net.centers) {
      if (space.distance(p, c) < delta) {
        admitted = false;
        break;
      }
    }
    if (admitted) net.centers.push_back(p);
  }
  return net;
}

Net build_partition(const MetricMeasureSpace& space, Net net) {
  const double delta = net.delta;
  const std::size_t n = space.size();
  if (net.centers.empty()) throw ContractError("net has no centers");
  for (std::size_t a = 0; a < net.centers.size(); ++a) {
    if (net.centers[a] >= n) throw ContractError("net center outside the space");
    for (std::size_t b = a + 1; b < net.centers.size(); ++b) {
      if (space.distance(net.centers[a], net.centers[b]) < delta) {
        throw ContractError("net centers closer than delta");
      }
    }
  }
  // Which center (if any) holds each point in its delta/2 ball. These balls
  // are disjoint for a delta-separated set, so at most one applies.
  std::vector<std::size_t> half_owner(n, kUnassigned);
  for (std::size_t p = 0; p < n; ++p) {
    bool covered = false;
    for (std::size_t c = 0; c < net.centers.size(); ++c) {
      const double d = space.distance(p, net.centers[c]);
      if (d < delta) covered = true;
      if (d < 0.5 * delta) half_owner[p] = c;
    }
    if (!covered) {
      throw ContractError("net is not maximal: point " + std::to_string(p) +
                          " is at distance >= delta from every center");
    }
  }

  net.assignment.assign(n, kUnassigned);
  for (std::size_t c = 0; c < net.centers.size(); ++c) {
    for (std::size_t p = 0; p < n; ++p) {
      if (net.assignment[p] != kUnassigned) continue;
      if (half_owner[p] != kUnassigned && half_owner[p] != c) continue;
      if (space.distance(p, net.centers[c]) < delta) net.assignment[p] = c;
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (net.assignment[p] != kUnassigned) continue;
    std::size_t best = 0;
    for (std::size_t c = 1; c < net.centers.size(); ++c) {
      if (space.distance(p, net.centers[c]) < space.distance(p, net.centers[best])) best = c;
    }
    net.assignment[p] = best;
  }
  return net;
}

std::vector<VerificationReport> verify_net_invariants(const MetricMeasureSpace& space,
                                                      const Net& net) {
  const double delta = net.delta;
  const Context ctx{{"delta", delta}, {"n_centers", static_cast<double>(net.centers.size())}};
  std::vector<VerificationReport> out;

  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < net.centers.size(); ++a) {
    for (std::size_t b = a + 1; b < net.centers.size(); ++b) {
      min_sep = std::min(min_sep, space.distance(net.centers[a], net.centers[b]));
    }
  }
  if (std::isfinite(min_sep)) {
    out.push_back(lower_bound_report("net.separation", min_sep, delta, delta, ctx));
  }

  // Covering radius: every point strictly inside some B(iota, delta).
  double covering = 0.0;
  for (std::size_t p = 0; p < space.size(); ++p) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t c : net.centers) nearest = std::min(nearest, space.distance(p, c));
    covering = std::max(covering, nearest);
  }
  out.push_back(upper_bound_report("net.covering", covering, delta, delta, ctx));

  if (net.partitioned()) {
    // Count sandwich violations: points of B(iota, delta/2) outside P_iota and
    // points of P_iota outside B(iota, delta).
    double violations = 0.0;
    for (std::size_t p = 0; p < space.size(); ++p) {
      const std::size_t cell = net.assignment[p];
      if (cell >= net.centers.size()) {
        violations += 1.0;
        continue;
      }
      if (!(space.distance(p, net.centers[cell]) < delta)) violations += 1.0;
      for (std::size_t c = 0; c < net.centers.size(); ++c) {
        if (c != cell && space.distance(p, net.centers[c]) < 0.5 * delta) violations += 1.0;
      }
    }
    out.push_back(upper_bound_report("net.sandwich", violations, 0.0, 0.0, ctx));

    double mass = 0.0;
    for (double m : net.cell_masses(space)) mass += m;
    const double defect = std::abs(mass - space.total_mass());
    out.push_back(upper_bound_report("net.mass", defect, 1e-12, 1e-12, ctx));
  }
  return out;
}

std::vector<VerificationReport> verify_net_sums(const MetricMeasureSpace& space, const Net& net,
                                                std::span<const PointPair> samples,
                                                double delta_star, double sigma_exp, int k) {
  const double delta = net.delta;
  if (delta_star < delta) throw DomainError("verify_net_sums: delta_star must be >= delta");
  if (k < 1) throw DomainError("verify_net_sums: k must be a positive integer");
  const double kd = k;
  const auto masses = net.cell_masses(space);
  const std::size_t m = net.centers.size();

  std::vector<double> center_vol_star(m);
  for (std::size_t c = 0; c < m; ++c) center_vol_star[c] = ball_volume(space, net.centers[c], delta_star);
  const auto envelope_star = [&](std::size_t s, double vol_s, std::size_t c) {
    const double d = space.distance(s, net.centers[c]);
    return std::pow(vol_s * center_vol_star[c], -0.5) * decay(d, delta_star, sigma_exp);
  };

  const double cR = std::exp2(2.0 * kd + 2.0);
  const double cS = std::exp2(3.0 * kd + 2.0);
  const double cU = std::exp2(sigma_exp + 3.0 * kd + 3.0);
  const double cV = std::exp2(sigma_exp + 2.0 * kd + 3.0);
  const bool envelope_sums = sigma_exp >= 2.0 * kd + 1.0;

  std::vector<VerificationReport> out;
  for (const auto& [s1, s2] : samples) {
    const Context ctx{{"k", kd},
                      {"delta", delta},
                      {"delta_star", delta_star},
                      {"sigma", sigma_exp},
                      {"s1", static_cast<double>(s1)},
                      {"s2", static_cast<double>(s2)}};
    double sum_r = 0.0, sum_s = 0.0, sum_t = 0.0, sum_u = 0.0, sum_v = 0.0;
    const double vol1_star = ball_volume(space, s1, delta_star);
    const double vol2_star = ball_volume(space, s2, delta_star);
    for (std::size_t c = 0; c < m; ++c) {
      const double d1 = space.distance(s1, net.centers[c]);
      const double d2 = space.distance(s2, net.centers[c]);
      sum_r += masses[c] * decay(d1, delta, kd + 1.0);
      sum_s += decay(d1, delta, 2.0 * kd + 1.0);
      sum_t += masses[c] / center_vol_star[c] * decay(d1, delta_star, 2.0 * kd + 1.0);
      if (envelope_sums) {
        sum_u += masses[c] * envelope_star(s1, vol1_star, c) * envelope_star(s2, vol2_star, c);
        sum_v += decay(d1, delta, sigma_exp) * decay(d2, delta, sigma_exp);
      }
    }
    out.push_back(upper_bound_report("thm.sum.R", sum_r, cR * ball_volume(space, s1, delta), cR, ctx));
    out.push_back(upper_bound_report("thm.sum.S", sum_s, cS, cS, ctx));
    out.push_back(upper_bound_report("thm.sum.T", sum_t, cS, cS, ctx));
    if (envelope_sums) {
      const double d12 = space.distance(s1, s2);
      const double e12 = std::pow(vol1_star * vol2_star, -0.5) * decay(d12, delta_star, sigma_exp);
      out.push_back(upper_bound_report("thm.sum.U", sum_u, cU * e12, cU, ctx));
      out.push_back(upper_bound_report("thm.sum.V", sum_v, cV * decay(d12, delta, sigma_exp), cV, ctx));
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const Net& net) {
  j = nlohmann::json{{"delta", net.delta}, {"centers", net.centers}, {"assignment", net.assignment}};
}

void from_json(const nlohmann::json& j, Net& net) {
  net.delta = j.at("delta").get<double>();
  net.centers = j.at("centers").get<std::vector<std::size_t>>();
  net.assignment = j.at("assignment").get<std::vector<std::size_t>>();
}

void write_net_csv(const MetricMeasureSpace& space, const Net& net, std::ostream& out) {
  out << "center_index,point,cell_mass\n";
  std::vector<double> masses;
  if (net.partitioned()) masses = net.cell_masses(space);
  for (std::size_t c = 0; c < net.centers.size(); ++c) {
    out << net.centers[c] << ',' << detail::format_double(space.point(net.centers[c])) << ','
        << (masses.empty() ? std::string() : detail::format_double(masses[c])) << '\n';
  }
}

}  // namespace heatframe
