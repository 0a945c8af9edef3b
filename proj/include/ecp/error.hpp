#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecp {

enum class ErrorKind {
  ZeroState,
  ShapeMismatch,
  NonFiniteAmplitude,
  LinearBasisPhoton,
  CircularBasisPhoton,
  SingularDenominator,
  InvalidParameters,
  InvalidCoefficients,
  DegenerateCoefficients,
  UnknownDetector,
  DomainError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

class EcpError : public std::runtime_error {
 public:
  EcpError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ecp
