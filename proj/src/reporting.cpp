#include "heatframe/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <tuple>

#include "heatframe/errors.hpp"

namespace heatframe {

namespace {

constexpr std::string_view kRegistry[] = {
    // geometry
    "growth.J", "growth.K", "growth.Y", "growth.reverse", "metric.axioms",
    // nets
    "net.separation", "net.covering", "net.sandwich", "net.mass", "thm.sum.R", "thm.sum.S",
    "thm.sum.T", "thm.sum.U", "thm.sum.V",
    // envelope
    "env.eq17", "env.eq17.sharp", "env.eq18", "env.eq19", "env.lp_norm", "env.Q", "lemma.a",
    "lemma.b.1", "lemma.b.2", "lemma.b.3", "lemma.c",
    // jacobi
    "jacobi.orthonormality", "jacobi.form_symmetry", "jacobi.carre_du_champ",
    "jacobi.carre_du_champ.positivity",
    // heat
    "heat.markov", "heat.semigroup", "heat.eigen_action", "heat.symmetry", "heat.contraction",
    // operators
    "young", "schur", "band.parseval", "band.reconstruction", "band.orthogonality",
    // fits (FitReport bound ids share the namespace)
    "fit.gaussian", "fit.holder", "fit.poincare", "fit.frame_bounds", "multiplier.commute",
};

VerificationReport make_report(std::string_view check_id, double lhs, double rhs,
                               double paper_constant, double margin, Context context) {
  if (!is_registered_check(check_id)) {
    throw DomainError("unknown check id: " + std::string(check_id));
  }
  VerificationReport r;
  r.check_id = std::string(check_id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.paper_constant = paper_constant;
  r.margin = margin;
  r.passed = margin_passes(margin, rhs);
  r.context = std::move(context);
  return r;
}

}  // namespace

std::span<const std::string_view> check_registry() { return kRegistry; }

bool is_registered_check(std::string_view check_id) {
  return std::find(std::begin(kRegistry), std::end(kRegistry), check_id) != std::end(kRegistry);
}

bool margin_passes(double margin, double rhs) {
  // NaN margins fail.
  return margin >= -kMarginTolerance * std::max(1.0, std::abs(rhs));
}

VerificationReport upper_bound_report(std::string_view check_id, double lhs, double rhs,
                                      double paper_constant, Context context) {
  return make_report(check_id, lhs, rhs, paper_constant, rhs - lhs, std::move(context));
}

VerificationReport lower_bound_report(std::string_view check_id, double lhs, double rhs,
                                      double paper_constant, Context context) {
  return make_report(check_id, lhs, rhs, paper_constant, lhs - rhs, std::move(context));
}

std::vector<SummaryRow> aggregate(std::span<const VerificationReport> reports) {
  if (reports.empty()) {
    throw DomainError("aggregate: empty report list");
  }
  std::map<std::string, SummaryRow> rows;
  for (const auto& r : reports) {
    auto [it, inserted] = rows.try_emplace(r.check_id);
    SummaryRow& row = it->second;
    // Worst case is the smallest margin; ties resolved on the context so the
    // summary does not depend on report order.
    const bool worse = inserted || r.margin < row.worst_margin ||
                       (r.margin == row.worst_margin && r.context < row.worst_context);
    if (inserted) row.check_id = r.check_id;
    ++row.count;
    if (r.passed) ++row.passed;
    if (worse) {
      row.worst_margin = r.margin;
      row.worst_context = r.context;
    }
  }
  std::vector<SummaryRow> out;
  out.reserve(rows.size());
  for (auto& [id, row] : rows) {
    row.pass_rate = static_cast<double>(row.passed) / static_cast<double>(row.count);
    out.push_back(std::move(row));
  }
  return out;
}

bool all_passed(std::span<const VerificationReport> reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const VerificationReport& r) { return r.passed; });
}

bool constants_finite(const FitReport& fit) {
  return std::all_of(fit.fitted_constants.begin(), fit.fitted_constants.end(),
                     [](const auto& kv) { return std::isfinite(kv.second); });
}

FitReport with_stability(const FitReport& coarse, FitReport fine, double relative_tolerance) {
  bool stable = constants_finite(coarse) && constants_finite(fine) &&
                coarse.fitted_constants.size() == fine.fitted_constants.size();
  for (const auto& [name, value] : fine.fitted_constants) {
    if (!stable) break;
    auto it = coarse.fitted_constants.find(name);
    if (it == coarse.fitted_constants.end()) {
      stable = false;
      break;
    }
    const double scale = std::max(std::abs(it->second), std::abs(value));
    if (scale > 0.0 && std::abs(value - it->second) > relative_tolerance * scale) stable = false;
  }
  fine.stable = stable;
  return fine;
}

void to_json(nlohmann::json& j, const VerificationReport& report) {
  j = nlohmann::json{{"check_id", report.check_id},
                     {"lhs", report.lhs},
                     {"rhs", report.rhs},
                     {"paper_constant", report.paper_constant},
                     {"margin", report.margin},
                     {"passed", report.passed},
                     {"context", report.context}};
}

void from_json(const nlohmann::json& j, VerificationReport& report) {
  const auto id = j.at("check_id").get<std::string>();
  if (!is_registered_check(id)) {
    throw DomainError("unknown check id: " + id);
  }
  report.check_id = id;
  report.lhs = j.at("lhs").get<double>();
  report.rhs = j.at("rhs").get<double>();
  report.paper_constant = j.at("paper_constant").get<double>();
  report.margin = j.at("margin").get<double>();
  report.passed = j.at("passed").get<bool>();
  report.context = j.at("context").get<Context>();
}

void to_json(nlohmann::json& j, const SummaryRow& row) {
  j = nlohmann::json{{"check_id", row.check_id},         {"count", row.count},
                     {"passed", row.passed},             {"pass_rate", row.pass_rate},
                     {"worst_margin", row.worst_margin}, {"worst_context", row.worst_context}};
}

void to_json(nlohmann::json& j, const FitReport& fit) {
  j = nlohmann::json{{"bound_id", fit.bound_id},
                     {"fitted_constants", fit.fitted_constants},
                     {"n_samples", fit.n_samples},
                     {"max_margin", fit.max_margin},
                     {"stable", fit.stable}};
}

}  // namespace heatframe
