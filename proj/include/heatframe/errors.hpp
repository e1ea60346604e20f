#pragma once

#include <stdexcept>
#include <string>

namespace heatframe {

/// Parameter outside the admissible range of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The discretization cannot resolve the requested scale (e.g. an empty ball).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Averaging over a ball that contains no mass.
class DegenerateBallError : public ResolutionError {
 public:
  using ResolutionError::ResolutionError;
};

/// Quadrature or spectral truncation is not exact enough for the request.
class ExactnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function carries energy above the representable polynomial degree.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs disagree with each other (sizes, non-maximal nets, bad certificates).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// No admissible samples were supplied to a fitting procedure.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace heatframe
