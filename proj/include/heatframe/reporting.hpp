#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace heatframe {

using Context = std::map<std::string, double>;

/// Relative slack granted to "exact" inequalities before a check fails.
inline constexpr double kMarginTolerance = 1e-12;

/// Outcome of a single inequality check.
///
/// `margin` is oriented so that a nonnegative value means the inequality
/// holds: rhs - lhs for upper bounds, lhs - rhs for lower bounds.
struct VerificationReport {
  std::string check_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double paper_constant = 0.0;
  double margin = 0.0;
  bool passed = false;
  Context context;
};

/// All check identifiers a report may carry.
std::span<const std::string_view> check_registry();
bool is_registered_check(std::string_view check_id);

/// lhs <= rhs. Throws DomainError (an std::invalid_argument) for unregistered ids.
VerificationReport upper_bound_report(std::string_view check_id, double lhs, double rhs,
                                      double paper_constant, Context context = {});
/// lhs >= rhs.
VerificationReport lower_bound_report(std::string_view check_id, double lhs, double rhs,
                                      double paper_constant, Context context = {});

bool margin_passes(double margin, double rhs);

struct SummaryRow {
  std::string check_id;
  std::size_t count = 0;
  std::size_t passed = 0;
  double pass_rate = 0.0;
  double worst_margin = 0.0;
  Context worst_context;
};

/// Groups reports by check id (sorted), independent of input order.
std::vector<SummaryRow> aggregate(std::span<const VerificationReport> reports);

bool all_passed(std::span<const VerificationReport> reports);

/// Result of a constant-fitting procedure. These never gate a run; they are
/// accepted when every constant is finite and the refinement study agrees.
struct FitReport {
  std::string bound_id;
  std::map<std::string, double> fitted_constants;
  std::size_t n_samples = 0;
  double max_margin = 0.0;
  bool stable = false;
};

bool constants_finite(const FitReport& fit);

/// Marks `fine.stable` when every constant of `fine` is finite and within
/// `relative_tolerance` of the matching constant in `coarse`.
FitReport with_stability(const FitReport& coarse, FitReport fine, double relative_tolerance);

void to_json(nlohmann::json& j, const VerificationReport& report);
void from_json(const nlohmann::json& j, VerificationReport& report);
void to_json(nlohmann::json& j, const SummaryRow& row);
void to_json(nlohmann::json& j, const FitReport& fit);

}  // namespace heatframe
