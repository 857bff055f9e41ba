#include "sgw/error.hpp"

namespace sgw {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::NotASimplePole: return "NotASimplePole";
    case ErrorCode::OracleMismatch: return "OracleMismatch";
    case ErrorCode::AxiomViolation: return "AxiomViolation";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::StripViolation: return "StripViolation";
    case ErrorCode::QuadratureWarning: return "QuadratureWarning";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::TruncationOverflow: return "TruncationOverflow";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NegativeResidue: return "NegativeResidue";
    case ErrorCode::FitInconsistent: return "FitInconsistent";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::PoleOnPath: return "PoleOnPath";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InterpolationWarning: return "InterpolationWarning";
    case ErrorCode::TailWarning: return "TailWarning";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace sgw
