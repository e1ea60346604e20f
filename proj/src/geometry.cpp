#include "heatframe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "detail/format.hpp"
#include "heatframe/errors.hpp"

namespace heatframe {

namespace {

void require_weights(const std::vector<double>& points, const std::vector<double>& weights) {
  if (points.empty()) throw DomainError("space needs at least one point");
  if (points.size() != weights.size()) throw ContractError("points and weights differ in length");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("weights must be strictly positive");
  }
}

// Sorted (distance, weight) pairs around a center, with running weight sums,
// so ball volumes for many radii cost one binary search each.
struct RadialProfile {
  std::vector<double> distances;
  std::vector<double> cumulative;  // cumulative[i] = sum of weights of distances[0..i)

  RadialProfile(const MetricMeasureSpace& space, std::size_t center) {
    const std::size_t n = space.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = space.distance(center, j);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return d[a] < d[b] || (d[a] == d[b] && a < b);
    });
    distances.resize(n);
    cumulative.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      distances[i] = d[order[i]];
      cumulative[i + 1] = cumulative[i] + space.weight(order[i]);
    }
  }

  double volume(double r) const {
    const auto it = std::lower_bound(distances.begin(), distances.end(), r);
    return cumulative[static_cast<std::size_t>(it - distances.begin())];
  }
};

}  // namespace

MetricMeasureSpace::MetricMeasureSpace(std::vector<double> points, std::vector<double> weights,
                                       MetricKind kind)
    : points_(std::move(points)), weights_(std::move(weights)), kind_(kind) {
  require_weights(points_, weights_);
}

void MetricMeasureSpace::finish(std::optional<double> diameter) {
  total_mass_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  const std::size_t n = size();
  double max_pair = 0.0;
  if (kind_ == MetricKind::custom_table) {
    resolution_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        max_pair = std::max(max_pair, distance(i, j));
        if (j != i) nearest = std::min(nearest, distance(i, j));
      }
      if (n > 1) resolution_ = std::max(resolution_, nearest);
    }
  } else {
    std::vector<double> sorted = coords_;
    std::sort(sorted.begin(), sorted.end());
    max_pair = sorted.back() - sorted.front();
    resolution_ = 0.0;
    for (std::size_t i = 1; i < n; ++i) resolution_ = std::max(resolution_, sorted[i] - sorted[i - 1]);
  }
  diameter_ = diameter.value_or(max_pair);
}

MetricMeasureSpace MetricMeasureSpace::arccos(std::vector<double> points,
                                              std::vector<double> weights) {
  MetricMeasureSpace s(std::move(points), std::move(weights), MetricKind::arccos);
  s.coords_.reserve(s.size());
  for (double x : s.points_) {
    if (!(x >= -1.0 && x <= 1.0)) throw DomainError("arccos metric needs points in [-1, 1]");
    s.coords_.push_back(std::acos(x));
  }
  s.finish(std::numbers::pi);
  return s;
}

MetricMeasureSpace MetricMeasureSpace::euclidean(std::vector<double> points,
                                                 std::vector<double> weights) {
  MetricMeasureSpace s(std::move(points), std::move(weights), MetricKind::euclidean);
  s.coords_ = s.points_;
  s.finish(std::nullopt);
  return s;
}

MetricMeasureSpace MetricMeasureSpace::custom(std::vector<double> labels,
                                              std::vector<double> weights,
                                              Eigen::MatrixXd distances) {
  MetricMeasureSpace s(std::move(labels), std::move(weights), MetricKind::custom_table);
  const auto n = static_cast<Eigen::Index>(s.size());
  if (distances.rows() != n || distances.cols() != n) {
    throw ContractError("distance table must be size x size");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0) throw DomainError("distance table must vanish on the diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (distances(i, j) != distances(j, i) || !(distances(i, j) >= 0.0)) {
        throw DomainError("distance table must be symmetric and nonnegative");
      }
    }
  }
  s.table_ = std::move(distances);
  s.finish(std::nullopt);
  return s;
}

double MetricMeasureSpace::distance(std::size_t i, std::size_t j) const {
  if (kind_ == MetricKind::custom_table) {
    return table_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return std::abs(coords_[i] - coords_[j]);
}

std::size_t MetricMeasureSpace::index_of(double x) const {
  const auto it = std::find(points_.begin(), points_.end(), x);
  if (it == points_.end()) throw DomainError("point " + std::to_string(x) + " is not in the space");
  return static_cast<std::size_t>(it - points_.begin());
}

std::size_t MetricMeasureSpace::nearest_index(double x) const {
  const double c = (kind_ == MetricKind::arccos) ? std::acos(std::clamp(x, -1.0, 1.0)) : x;
  const auto& ref = (kind_ == MetricKind::custom_table) ? points_ : coords_;
  std::size_t best = 0;
  for (std::size_t i = 1; i < ref.size(); ++i) {
    if (std::abs(ref[i] - c) < std::abs(ref[best] - c)) best = i;
  }
  return best;
}

MetricMeasureSpace make_jacobi_space(double gamma, double alpha, std::size_t n_nodes) {
  const JacobiParams params{gamma, alpha};
  params.validate();
  if (n_nodes < 2) throw DomainError("make_jacobi_space: need at least 2 nodes");
  auto rule = gauss_jacobi(params, n_nodes);
  auto space = MetricMeasureSpace::arccos(std::move(rule.nodes), std::move(rule.weights));
  space.jacobi_ = params;
  return space;
}

double ball_volume(const MetricMeasureSpace& space, std::size_t center, double r) {
  if (center >= space.size()) throw DomainError("ball center is not a point of the space");
  if (!(r >= 0.0)) throw DomainError("ball radius must be nonnegative");
  double v = 0.0;
  for (std::size_t j = 0; j < space.size(); ++j) {
    if (space.distance(center, j) < r) v += space.weight(j);
  }
  return v;
}

std::vector<double> ball_volumes(const MetricMeasureSpace& space, double r) {
  std::vector<double> out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) out[i] = ball_volume(space, i, r);
  return out;
}

double mean_value(const MetricMeasureSpace& space, std::span<const double> f, std::size_t center,
                  double r) {
  if (f.size() != space.size()) throw ContractError("mean_value: f has the wrong length");
  if (center >= space.size()) throw DomainError("ball center is not a point of the space");
  double mass = 0.0;
  double integral = 0.0;
  for (std::size_t j = 0; j < space.size(); ++j) {
    if (space.distance(center, j) < r) {
      mass += space.weight(j);
      integral += space.weight(j) * f[j];
    }
  }
  if (!(mass > 0.0)) throw DegenerateBallError("mean_value: ball carries no mass");
  return integral / mass;
}

int DoublingProfile::k() const {
  return std::max(1, static_cast<int>(std::ceil(k_hat - 1e-12)));
}

DoublingProfile estimate_doubling(const MetricMeasureSpace& space,
                                  std::span<const std::size_t> centers,
                                  std::span<const double> radii, double reverse_min_radius) {
  if (centers.empty() || radii.empty()) throw DomainError("estimate_doubling: empty sample");
  const double reverse_max = space.diameter() / 3.0;
  double sup_ratio = 1.0;
  double inf_ratio = std::numeric_limits<double>::infinity();
  double unit_min = std::numeric_limits<double>::infinity();
  for (std::size_t c : centers) {
    if (c >= space.size()) throw DomainError("doubling center is not a point of the space");
    const RadialProfile profile(space, c);
    unit_min = std::min(unit_min, profile.volume(1.0));
    for (double r : radii) {
      if (!(r > 0.0)) throw DomainError("doubling radii must be positive");
      const double inner = profile.volume(r);
      if (!(inner > 0.0)) {
        throw ResolutionError("ball of radius " + std::to_string(r) + " has zero volume");
      }
      const double ratio = profile.volume(2.0 * r) / inner;
      sup_ratio = std::max(sup_ratio, ratio);
      if (r >= reverse_min_radius && r <= reverse_max) inf_ratio = std::min(inf_ratio, ratio);
    }
  }
  DoublingProfile p;
  p.k_hat = std::log2(sup_ratio);
  p.alpha_hat = std::isfinite(inf_ratio) ? std::log2(inf_ratio) : 0.0;
  p.a_noncollapse = unit_min;
  p.a_caret = std::exp2(-p.k_hat) * p.a_noncollapse;
  return p;
}

std::vector<double> critical_radii(const MetricMeasureSpace& space, std::size_t center) {
  std::vector<double> breaks;
  breaks.reserve(2 * space.size());
  for (std::size_t j = 0; j < space.size(); ++j) {
    const double d = space.distance(center, j);
    if (d > 0.0) {
      breaks.push_back(d);
      breaks.push_back(0.5 * d);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> radii;
  if (breaks.empty()) return {1.0};
  radii.reserve(breaks.size() + 1);
  radii.push_back(0.5 * breaks.front());
  for (std::size_t i = 1; i < breaks.size(); ++i) radii.push_back(0.5 * (breaks[i - 1] + breaks[i]));
  radii.push_back(2.0 * breaks.back());
  return radii;
}

DoublingProfile exact_doubling_profile(const MetricMeasureSpace& space) {
  const double reverse_min = space.resolution();
  const double reverse_max = space.diameter() / 3.0;
  double sup_ratio = 1.0;
  double inf_ratio = std::numeric_limits<double>::infinity();
  double unit_min = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < space.size(); ++c) {
    const RadialProfile profile(space, c);
    unit_min = std::min(unit_min, profile.volume(1.0));
    auto radii = critical_radii(space, c);
    for (double r : radii) {
      sup_ratio = std::max(sup_ratio, profile.volume(2.0 * r) / profile.volume(r));
    }
    if (reverse_min <= reverse_max) {
      // The ratio is piecewise constant, so the endpoints plus the interior
      // representatives cover every value it takes on the interval.
      radii.push_back(reverse_min);
      radii.push_back(reverse_max);
      for (double r : radii) {
        if (r < reverse_min || r > reverse_max) continue;
        inf_ratio = std::min(inf_ratio, profile.volume(2.0 * r) / profile.volume(r));
      }
    }
  }
  DoublingProfile p;
  p.k_hat = std::log2(sup_ratio);
  p.alpha_hat = std::isfinite(inf_ratio) ? std::log2(inf_ratio) : 0.0;
  p.a_noncollapse = unit_min;
  p.a_caret = std::exp2(-p.k_hat) * p.a_noncollapse;
  return p;
}

std::vector<VerificationReport> verify_ball_growth(const MetricMeasureSpace& space,
                                                   const DoublingProfile& profile,
                                                   std::span<const GrowthSample> samples,
                                                   std::optional<int> k_override) {
  const int k = k_override.value_or(profile.k());
  const double kd = k;
  const double a_caret = std::exp2(-kd) * profile.a_noncollapse;
  std::vector<VerificationReport> out;
  out.reserve(3 * samples.size());
  for (const auto& s : samples) {
    if (!(s.r > 0.0)) throw DomainError("growth sample radius must be positive");
    const Context ctx{{"k", kd}, {"r", s.r}, {"beta", s.beta},
                      {"s1", static_cast<double>(s.s1)}, {"s2", static_cast<double>(s.s2)}};
    const double b1 = ball_volume(space, s.s1, s.r);

    if (s.beta >= 1.0) {
      const double c = std::pow(2.0 * s.beta, kd);
      out.push_back(upper_bound_report("growth.J", ball_volume(space, s.s1, s.beta * s.r), c * b1,
                                       c, ctx));
    }

    const double d = space.distance(s.s1, s.s2);
    const double cK = std::exp2(kd) * std::pow(1.0 + d / s.r, kd);
    out.push_back(upper_bound_report("growth.K", b1, cK * ball_volume(space, s.s2, s.r), cK, ctx));

    if (s.r <= 1.0) {
      double inf_vol = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < space.size(); ++i) {
        inf_vol = std::min(inf_vol, ball_volume(space, i, s.r));
      }
      out.push_back(lower_bound_report("growth.Y", inf_vol, a_caret * std::pow(s.r, kd), a_caret,
                                       ctx));
    }
  }
  return out;
}

std::vector<VerificationReport> verify_reverse_doubling(const MetricMeasureSpace& space,
                                                        const DoublingProfile& profile,
                                                        std::span<const GrowthSample> samples) {
  const double c = 1.0 + std::pow(10.0, -profile.k_hat);
  std::vector<VerificationReport> out;
  for (const auto& s : samples) {
    if (s.r < space.resolution() || s.r > space.diameter() / 3.0) continue;
    const double inner = ball_volume(space, s.s1, s.r);
    out.push_back(lower_bound_report("growth.reverse", ball_volume(space, s.s1, 2.0 * s.r),
                                     c * inner, c,
                                     {{"r", s.r}, {"s1", static_cast<double>(s.s1)},
                                      {"k_hat", profile.k_hat}}));
  }
  return out;
}

std::vector<VerificationReport> verify_metric_axioms(
    const MetricMeasureSpace& space, std::span<const std::array<std::size_t, 3>> triples) {
  std::vector<VerificationReport> out;
  out.reserve(2 * triples.size());
  for (const auto& [a, b, c] : triples) {
    const Context ctx{{"a", static_cast<double>(a)}, {"b", static_cast<double>(b)},
                      {"c", static_cast<double>(c)}};
    const double dab = space.distance(a, b);
    out.push_back(upper_bound_report("metric.axioms", std::abs(dab - space.distance(b, a)), 0.0,
                                     0.0, ctx));
    // Triangle inequality within 1e-12.
    out.push_back(upper_bound_report("metric.axioms", space.distance(a, c),
                                     dab + space.distance(b, c) + 1e-12, 1.0, ctx));
  }
  return out;
}

void write_space_csv(const MetricMeasureSpace& space, std::ostream& out) {
  out << "point,weight\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << detail::format_double(space.point(i)) << ',' << detail::format_double(space.weight(i))
        << '\n';
  }
}

MetricMeasureSpace read_space_csv(std::istream& in, MetricKind kind) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("space CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "point,weight") throw DomainError("space CSV header must be 'point,weight'");
  std::vector<double> points;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("space CSV row without a comma: " + line);
    points.push_back(detail::parse_double(std::string_view(line).substr(0, comma)));
    weights.push_back(detail::parse_double(std::string_view(line).substr(comma + 1)));
  }
  switch (kind) {
    case MetricKind::arccos:
      return MetricMeasureSpace::arccos(std::move(points), std::move(weights));
    case MetricKind::euclidean:
      return MetricMeasureSpace::euclidean(std::move(points), std::move(weights));
    case MetricKind::custom_table:
      break;
  }
  throw DomainError("custom-table spaces need a distance table, not a CSV of points");
}

}  // namespace heatframe
