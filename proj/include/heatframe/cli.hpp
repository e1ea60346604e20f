#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace heatframe {

enum class Command { verify, kernel, net, decompose };

struct RunConfig {
  Command command = Command::verify;
  double gamma = 0.0;
  double alpha = 0.0;
  std::size_t nodes = 64;
  std::size_t degree = 40;
  double t = 0.5;
  double delta = 0.2;
  /// Defaults to 2k + 1.
  std::optional<double> sigma;
  std::optional<int> k_override;
  std::uint64_t seed = 1;
  /// "-" writes to standard output.
  std::string out = "-";
  /// decompose only: "random" or "P<i>".
  std::string function = "random";
};

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command command);

/// Throws DomainError / ExactnessError for configurations no command can run.
void validate(const RunConfig& config);

/// Runs the whole verification registry and returns the JSON document
/// {config, profile, summary, fits, failures, skipped, passed}.
nlohmann::json verify_document(const RunConfig& config);

/// Dispatches on config.command. Exit codes: 0 success, 1 an asserted check
/// failed, 2 invalid configuration (message on `err`).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace heatframe
