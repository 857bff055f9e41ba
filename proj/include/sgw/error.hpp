#ifndef SGW_ERROR_HPP
#define SGW_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sgw {

// Mirrors the numeric codes of the C API (sgw.h); keep in sync.
enum class ErrorCode : int {
  Ok = 0,
  DomainError = 1,
  PoleProximity = 2,
  NotASimplePole = 3,
  OracleMismatch = 4,
  AxiomViolation = 5,
  PositivityViolation = 6,
  NotFound = 7,
  StripViolation = 8,
  QuadratureWarning = 9,
  BudgetExceeded = 10,
  TruncationOverflow = 11,
  DomainViolation = 12,
  NegativeResidue = 13,
  FitInconsistent = 14,
  HypothesisViolation = 15,
  PoleOnPath = 16,
  ConfigError = 17,
  ParseError = 18,
  IoError = 19,
  InvalidArgument = 20,
  InterpolationWarning = 21,
  TailWarning = 22,
  Internal = 99,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace sgw

#endif  // SGW_ERROR_HPP
