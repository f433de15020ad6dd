#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdmft {

enum class ErrorCode {
  InvalidArgument,
  CenterSingular,   // polar angle undefined at the maximally mixed 1RDM
  NonConverged,
  DegenerateHull,
  KappaZero,        // no perturbative curve along the pole directions
  Divergent,
  ZeroOccupation,
  DivisionByZero,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::CenterSingular: return "CENTER_SINGULAR";
    case ErrorCode::NonConverged: return "NONCONVERGED";
    case ErrorCode::DegenerateHull: return "DEGENERATE_HULL";
    case ErrorCode::KappaZero: return "KAPPA_ZERO";
    case ErrorCode::Divergent: return "DIVERGENT";
    case ErrorCode::ZeroOccupation: return "ZERO_OCCUPATION";
    case ErrorCode::DivisionByZero: return "DIVISION_BY_ZERO";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rdmft
