#include "stpete/error.hpp"

namespace stpete {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TruncationInconclusive: return "TruncationInconclusive";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::SolverFailed: return "SolverFailed";
    case ErrorCode::BankruptTrajectory: return "BankruptTrajectory";
    case ErrorCode::NonpositiveReturn: return "NonpositiveReturn";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace stpete
