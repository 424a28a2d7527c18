#pragma once

#include <stdexcept>
#include <string>

namespace cone {

enum class ErrorCode {
  AlgebraMismatch,
  SingularElement,
  NotInCone,
  MinorVanishes,
  OutsideDomain,
  PoleHit,
  WeightTooLarge,
  NonIntegerDimension,
  ArgumentOffVariety,
  PochhammerZero,
  ParameterOutOfRange,
  UnsupportedAlgebra,
  GrowthIncompatible,
  QuadratureNotConverged,
};

const char* error_name(ErrorCode code);

class MathError : public std::runtime_error {
 public:
  MathError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cone
