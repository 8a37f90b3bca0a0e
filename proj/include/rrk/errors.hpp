#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rrk {

enum class ErrorKind {
  UnknownMethod,
  NotExplicit,
  NonFiniteState,
  NewtonDivergence,
  DegenerateDirection,
  BracketFailure,
  ToleranceNotMet,
  NotPartitioned,
  DomainViolation,
  UnknownInvariant,
  MissingDataFile,
  ReferenceUnavailable,
  SaturatedWindow,
  PreconditionViolated,
  ConfigError,
  IoError,
};

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorClass { Config, Numeric, Io };

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;
[[nodiscard]] ErrorClass error_class(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  /// Index of the failing step when raised from inside an integration loop.
  [[nodiscard]] std::optional<long> step() const noexcept { return step_; }

  Error with_step(long step) const {
    Error e(*this);
    e.step_ = step;
    return e;
  }

 private:
  ErrorKind kind_;
  std::optional<long> step_;
};

}  // namespace rrk
