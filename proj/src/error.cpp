#include "opfree/error.hpp"

namespace opfree {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::NoComplement: return "NoComplement";
    case ErrorKind::Underresolved: return "Underresolved";
    case ErrorKind::PecletViolation: return "PecletViolation";
    case ErrorKind::SingularOperator: return "SingularOperator";
    case ErrorKind::EmptyTail: return "EmptyTail";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ZeroEigenvalue: return "ZeroEigenvalue";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string_view module, const std::string& message)
    : std::runtime_error(message), kind_(kind), module_(module) {}

}  // namespace opfree
