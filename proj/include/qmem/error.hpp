#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmem {

enum class ErrorKind {
  InvalidDimension,
  InvalidSubsystem,
  InvalidState,
  InvalidChannel,
  InvalidArgument,
  Domain,
  UnphysicalState,
  NumericalDegeneracy,
  IntegrationFailure,
  ExtremumNotFound,
  AmplitudeVanishing,
  DimensionMismatch,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidSubsystem: return "invalid-subsystem";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::InvalidChannel: return "invalid-channel";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::UnphysicalState: return "unphysical-state";
    case ErrorKind::NumericalDegeneracy: return "numerical-degeneracy";
    case ErrorKind::IntegrationFailure: return "integration-failure";
    case ErrorKind::ExtremumNotFound: return "extremum-not-found";
    case ErrorKind::AmplitudeVanishing: return "amplitude-vanishing";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// True for errors that come from a numerical procedure rather than from bad
/// input (used by the CLI to pick an exit code).
inline bool is_numerical(ErrorKind kind) {
  return kind == ErrorKind::IntegrationFailure || kind == ErrorKind::NumericalDegeneracy ||
         kind == ErrorKind::ExtremumNotFound || kind == ErrorKind::AmplitudeVanishing;
}

}  // namespace qmem
