#ifndef VIDDE_ERROR_HPP
#define VIDDE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vidde {

enum class ErrorKind {
  // input validation
  MissingField,
  NonFiniteField,
  NonPositiveField,
  InvalidKernel,
  InvalidHistory,
  PositiveTheta,
  ConfigError,
  OutOfRange,
  UnknownScenario,
  NotOnBoundary,
  NonPositiveArgument,
  MissingEquilibrium,
  // numerics
  NonFiniteState,
  BlowUp,
  NegativeDiscriminant,
  NotEvaluable,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

  /// Numerical failures (as opposed to bad input).
  bool numerical() const noexcept {
    return kind_ == ErrorKind::NonFiniteState || kind_ == ErrorKind::BlowUp ||
           kind_ == ErrorKind::NegativeDiscriminant;
  }

 private:
  ErrorKind kind_;
};

struct FieldViolation {
  ErrorKind kind;
  std::string field;
  bool operator==(const FieldViolation&) const = default;
};

/// Parameter validation failure. kind() is that of the first violation.
class ParameterError : public Error {
 public:
  explicit ParameterError(std::vector<FieldViolation> violations);
  const std::vector<FieldViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<FieldViolation> violations_;
};

}  // namespace vidde

#endif  // VIDDE_ERROR_HPP
