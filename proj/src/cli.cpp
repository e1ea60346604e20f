#include "heatframe/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "heatframe/envelope.hpp"
#include "heatframe/errors.hpp"
#include "heatframe/geometry.hpp"
#include "heatframe/heat.hpp"
#include "heatframe/jacobi.hpp"
#include "heatframe/nets.hpp"
#include "heatframe/operators.hpp"
#include "heatframe/reporting.hpp"
#include "heatframe/sampling.hpp"

namespace heatframe {

namespace {

using Reports = std::vector<VerificationReport>;

void append(Reports& into, Reports more) {
  into.insert(into.end(), std::make_move_iterator(more.begin()),
              std::make_move_iterator(more.end()));
}

Eigen::VectorXd random_polynomial(Rng& rng, const SpectralBasis& basis, std::size_t degree) {
  return basis.synthesize(random_coefficients(rng, degree, basis.degree() + 1));
}

Eigen::VectorXd normalized(const MetricMeasureSpace& space, Eigen::VectorXd f, double p) {
  const double n = lp_norm(space, f, p);
  return n > 0.0 ? Eigen::VectorXd(f / n) : f;
}

int resolved_k(const RunConfig& config, const DoublingProfile& profile) {
  return config.k_override ? *config.k_override : profile.k();
}

double resolved_sigma(const RunConfig& config, int k) {
  return config.sigma ? *config.sigma : EnvelopeParams::default_sigma(k);
}

nlohmann::json config_json(const RunConfig& config, int k, double sigma) {
  nlohmann::json j{{"command", command_name(config.command)},
                   {"gamma", config.gamma},
                   {"alpha", config.alpha},
                   {"nodes", config.nodes},
                   {"degree", config.degree},
                   {"t", config.t},
                   {"delta", config.delta},
                   {"sigma", sigma},
                   {"k", k},
                   {"seed", config.seed}};
  j["k_override"] = config.k_override ? nlohmann::json(*config.k_override) : nlohmann::json();
  return j;
}

// Smallest grid time at which the spectral tail of `basis` is negligible.
std::vector<double> resolvable_times(const SpectralBasis& basis, std::vector<double> grid) {
  const double beta_n = basis.eigenvalues()[static_cast<Eigen::Index>(basis.degree())];
  std::erase_if(grid, [beta_n](double t) { return std::exp(-beta_n * t) >= kTailTolerance; });
  if (grid.empty()) {
    throw ExactnessError("degree too small: the spectral tail is not negligible for t <= 1");
  }
  return grid;
}

std::ostream* open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return &fallback;
  file.open(path, std::ios::binary);
  if (!file) throw DomainError("cannot open output file " + path);
  return &file;
}

Eigen::VectorXd decompose_input(const RunConfig& config, const SpectralBasis& basis) {
  if (config.function == "random") {
    Rng rng(config.seed);
    return random_polynomial(rng, basis, basis.degree());
  }
  if (config.function.size() > 1 && (config.function[0] == 'P' || config.function[0] == 'p')) {
    std::size_t i = 0;
    try {
      std::size_t used = 0;
      i = std::stoul(config.function.substr(1), &used);
      if (used + 1 != config.function.size()) throw DomainError("");
    } catch (const std::exception&) {
      throw DomainError("unknown function " + config.function);
    }
    if (i > basis.degree()) throw DomainError("basis index above the degree");
    return basis.values().row(static_cast<Eigen::Index>(i)).transpose();
  }
  throw DomainError("unknown function " + config.function + " (expected random or P<i>)");
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  if (name == "verify") return Command::verify;
  if (name == "kernel") return Command::kernel;
  if (name == "net") return Command::net;
  if (name == "decompose") return Command::decompose;
  return std::nullopt;
}

std::string command_name(Command command) {
  switch (command) {
    case Command::verify: return "verify";
    case Command::kernel: return "kernel";
    case Command::net: return "net";
    case Command::decompose: return "decompose";
  }
  return "verify";
}

void validate(const RunConfig& config) {
  JacobiParams{config.gamma, config.alpha}.validate();
  if (config.nodes < 2) throw DomainError("--nodes must be at least 2");
  if (config.degree + 1 > config.nodes) {
    throw ExactnessError("degree " + std::to_string(config.degree) + " needs at least " +
                         std::to_string(config.degree + 1) + " nodes for exact quadrature");
  }
  if (!(config.t > 0.0) || config.t > 1.0) throw DomainError("--t must lie in (0, 1]");
  if (!(config.delta > 0.0) || !std::isfinite(config.delta)) {
    throw DomainError("--delta must be positive");
  }
  if (config.k_override && *config.k_override < 1) throw DomainError("--k-override must be >= 1");
  if (config.sigma && !(std::isfinite(*config.sigma) && *config.sigma > 0.0)) {
    throw DomainError("--sigma must be positive");
  }
}

nlohmann::json verify_document(const RunConfig& config) {
  validate(config);
  const auto space = make_jacobi_space(config.gamma, config.alpha, config.nodes);
  const auto basis = build_basis(space, config.degree);
  const auto profile = exact_doubling_profile(space);
  const int k = resolved_k(config, profile);
  const double sigma = resolved_sigma(config, k);
  const EnvelopeParams params{config.delta, sigma, k};
  params.validate();

  Rng rng(config.seed);
  const std::size_t n = space.size();
  Reports reports;
  std::vector<FitReport> fits;
  std::vector<std::string> skipped;

  // Geometry.
  std::vector<std::array<std::size_t, 3>> triples(60);
  for (auto& tr : triples) {
    for (auto& i : tr) i = uniform_index(rng, n);
  }
  append(reports, verify_metric_axioms(space, triples));
  std::vector<GrowthSample> growth(60);
  for (auto& g : growth) {
    g.s1 = uniform_index(rng, n);
    g.s2 = uniform_index(rng, n);
    g.r = uniform(rng, space.resolution(), space.diameter());
    g.beta = uniform(rng, 1.0, 4.0);
  }
  append(reports, verify_ball_growth(space, profile, growth, config.k_override));
  append(reports, verify_reverse_doubling(space, profile, growth));

  // Nets and envelope algebra.
  const Net net = build_partition(space, build_maximal_net(space, config.delta));
  append(reports, verify_net_invariants(space, net));
  const auto pairs = random_pairs(rng, n, 60);
  append(reports, verify_net_sums(space, net, pairs, config.delta, sigma, k));
  append(reports, verify_envelope_scaling(space, params, 0.5, pairs));
  append(reports, verify_envelope_scaling(space, params, 2.0, pairs));
  std::vector<std::size_t> centers(10);
  for (auto& c : centers) c = uniform_index(rng, n);
  const std::vector<double> exponents{1.0, 2.0, 4.0};
  append(reports, verify_envelope_lp(space, params, centers, exponents));
  if (sigma > k) {
    append(reports, verify_lemma_integrals(space, params, pairs));
  } else {
    skipped.emplace_back("lemma: sigma <= k");
  }

  // Jacobi calculus.
  const std::size_t half = config.degree / 2;
  reports.push_back(verify_orthonormality(basis));
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> fg(20);
  for (auto& [f, g] : fg) {
    f = random_polynomial(rng, basis, half);
    g = random_polynomial(rng, basis, half);
  }
  append(reports, verify_form_symmetry(basis, fg));
  append(reports, verify_carre_du_champ(basis, fg));

  // Heat semigroup.
  for (double t : {0.05, 0.1, 0.5, 1.0}) reports.push_back(verify_markov(space, heat_kernel(basis, t)));
  for (int i = 0; i < 10; ++i) {
    const double t = uniform(rng, 0.05, 1.0);
    const double s = uniform(rng, 0.05, 1.0);
    reports.push_back(verify_semigroup(space, basis, t, s));
  }
  for (double t : {0.1, 0.5}) reports.push_back(verify_eigen_action(basis, t, std::min<std::size_t>(10, config.degree)));
  const auto kernel_t = heat_kernel(basis, config.t);
  std::vector<Eigen::VectorXd> unit_trials(20, Eigen::VectorXd(static_cast<Eigen::Index>(n)));
  for (auto& f : unit_trials) {
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = uniform01(rng);
  }
  append(reports, verify_contraction(basis, kernel_t, unit_trials));

  // Operators.
  const double t_young = config.delta * config.delta;
  const std::vector<std::pair<double, double>> pq{
      {1.0, 1.0}, {1.0, 2.0}, {2.0, 2.0}, {1.0, INFINITY}, {2.0, INFINITY}};
  const bool young_ok = sigma >= 2.0 * k + 1.0 && config.delta <= 1.0 && t_young <= 1.0;
  const auto heat_young = heat_kernel(basis, std::min(t_young, 1.0));
  std::optional<KernelOperator> dominated;
  if (young_ok) {
    const double a_prime = fit_domination(space, heat_young.table, params);
    dominated = KernelOperator::dominated(space, heat_young.table, {a_prime, params});
  } else {
    skipped.emplace_back("young: needs sigma >= 2k + 1 and delta <= 1");
  }
  const KernelOperator heat_op(heat_young.table);
  for (const auto& [p, q] : pq) {
    std::vector<Eigen::VectorXd> trials(20);
    for (auto& f : trials) f = normalized(space, random_polynomial(rng, basis, config.degree), p);
    if (dominated) append(reports, verify_young(space, *dominated, profile, p, q, trials));
    append(reports, verify_schur(space, heat_op, p, q, trials));
  }
  std::vector<Eigen::VectorXd> commute_trials(10);
  for (auto& f : commute_trials) f = random_polynomial(rng, basis, config.degree);
  const double t_m = config.t;
  append(reports, verify_multiplier_commute(
                      space, basis, [t_m](double b) { return std::exp(-t_m * b); },
                      [](double b) { return 1.0 / (1.0 + b); }, commute_trials));

  // Band decomposition.
  const Net fine_net = build_partition(space, build_maximal_net(space, config.delta / 2.0));
  double frame = 1.0, frame_refined = 1.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd f = random_polynomial(rng, basis, config.degree);
    const auto dec = band_decompose(space, basis, net, f);
    append(reports, verify_band(space, dec, f));
    frame = std::max(frame, dec.frame_ratio);
    frame_refined = std::max(frame_refined, band_decompose(space, basis, fine_net, f).frame_ratio);
  }
  FitReport frame_fit;
  frame_fit.bound_id = "fit.frame_bounds";
  frame_fit.fitted_constants = {{"F", frame}, {"F_refined", frame_refined}};
  frame_fit.n_samples = 20;
  frame_fit.stable = constants_finite(frame_fit);
  frame_fit.max_margin = frame_refined > 0.0 ? 1.0 - frame / std::max(frame, frame_refined) : 0.0;

  // Fits, each compared against a run with doubled nodes and degree.
  const auto fine_space = make_jacobi_space(config.gamma, config.alpha, 2 * config.nodes);
  const auto fine_basis = build_basis(fine_space, 2 * config.degree);
  const auto t_grid = resolvable_times(basis, {0.05, 0.1, 0.25, 0.5, 1.0});
  std::vector<CoordinatePair> coords(200);
  for (auto& c : coords) c = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
  const auto gauss = fit_gaussian_bounds(space, basis, t_grid, coords);
  const auto gauss_fine = fit_gaussian_bounds(fine_space, fine_basis, t_grid, coords);
  fits.push_back(with_stability(gauss_fine.report(), gauss.report(), 0.2));

  std::vector<HolderTriple> holder(200);
  for (auto& h : holder) {
    const double s2 = uniform(rng, 0.0, M_PI);
    const double step = uniform(rng, -0.2, 0.2);
    h = {uniform(rng, -1.0, 1.0), std::cos(s2), std::cos(std::clamp(s2 + step, 0.0, M_PI))};
  }
  auto holder_fit = fit_holder(space, basis, t_grid, holder, gauss);
  {
    const double coarse_gamma = holder_fit.fitted_constants.at("gamma_H");
    const double fine_gamma =
        fit_holder(fine_space, fine_basis, t_grid, holder, gauss_fine).fitted_constants.at("gamma_H");
    holder_fit.stable = std::isfinite(coarse_gamma) && std::isfinite(fine_gamma) &&
                        coarse_gamma > 0.0 && fine_gamma > 0.0 &&
                        std::abs(fine_gamma - coarse_gamma) <= 0.2 * std::max(coarse_gamma, fine_gamma);
  }
  fits.push_back(holder_fit);

  std::vector<PoincareBall> balls(20);
  for (auto& b : balls) b = {uniform(rng, -1.0, 1.0), uniform(rng, 0.2, 1.0)};
  std::vector<Eigen::VectorXd> poincare_trials(10);
  for (auto& c : poincare_trials) c = random_coefficients(rng, half, half + 1);
  fits.push_back(with_stability(verify_poincare(fine_space, fine_basis, balls, poincare_trials),
                                verify_poincare(space, basis, balls, poincare_trials), 0.1));
  fits.push_back(frame_fit);

  nlohmann::json doc;
  doc["config"] = config_json(config, k, sigma);
  doc["profile"] = {{"k_hat", profile.k_hat},
                    {"alpha_hat", profile.alpha_hat},
                    {"a_noncollapse", profile.a_noncollapse},
                    {"a_caret", profile.a_caret},
                    {"k", profile.k()}};
  doc["summary"] = aggregate(reports);
  doc["fits"] = fits;
  auto failures = nlohmann::json::array();
  for (const auto& r : reports) {
    if (!r.passed) failures.push_back(r);
  }
  doc["failures"] = failures;
  doc["skipped"] = skipped;
  doc["n_reports"] = reports.size();
  doc["passed"] = failures.empty();
  return doc;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    std::ofstream file;
    switch (config.command) {
      case Command::verify: {
        const auto doc = verify_document(config);
        std::ostream* sink = open_output(config.out, file, out);
        *sink << doc.dump(2) << '\n';
        const std::size_t failed = doc["failures"].size();
        err << "verify: " << doc["n_reports"].get<std::size_t>() << " checks, " << failed
            << " failed\n";
        return failed == 0 ? 0 : 1;
      }
      case Command::kernel: {
        const auto space = make_jacobi_space(config.gamma, config.alpha, config.nodes);
        const auto kernel = heat_kernel(build_basis(space, config.degree), config.t);
        if (kernel.truncation_warning()) {
          err << "warning: spectral tail " << kernel.tail_bound << " at t = " << config.t << '\n';
        }
        write_kernel_csv(kernel, *open_output(config.out, file, out));
        return 0;
      }
      case Command::net: {
        const auto space = make_jacobi_space(config.gamma, config.alpha, config.nodes);
        const Net net = build_partition(space, build_maximal_net(space, config.delta));
        write_net_csv(space, net, *open_output(config.out, file, out));
        return 0;
      }
      case Command::decompose: {
        const auto space = make_jacobi_space(config.gamma, config.alpha, config.nodes);
        const auto basis = build_basis(space, config.degree);
        const Net net = build_partition(space, build_maximal_net(space, config.delta));
        const auto dec = band_decompose(space, basis, net, decompose_input(config, basis));
        std::ostream* sink = open_output(config.out, file, out);
        write_decomposition_csv(dec, net, *sink);
        if (sink != &out) out << nlohmann::json(dec).dump(2) << '\n';
        return 0;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace heatframe
