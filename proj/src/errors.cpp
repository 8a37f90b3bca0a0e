#include "rrk/errors.hpp"

namespace rrk {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownMethod: return "UnknownMethod";
    case ErrorKind::NotExplicit: return "NotExplicit";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::NotPartitioned: return "NotPartitioned";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::UnknownInvariant: return "UnknownInvariant";
    case ErrorKind::MissingDataFile: return "MissingDataFile";
    case ErrorKind::ReferenceUnavailable: return "ReferenceUnavailable";
    case ErrorKind::SaturatedWindow: return "SaturatedWindow";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownMethod:
    case ErrorKind::UnknownInvariant:
    case ErrorKind::NotPartitioned:
    case ErrorKind::ConfigError:
    case ErrorKind::PreconditionViolated:
    case ErrorKind::ReferenceUnavailable:
      return ErrorClass::Config;
    case ErrorKind::MissingDataFile:
    case ErrorKind::IoError:
      return ErrorClass::Io;
    default:
      return ErrorClass::Numeric;
  }
}

}  // namespace rrk
