#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stpete {

enum class ErrorCode {
  InvalidArgument,
  OutOfSupport,
  ParseError,
  TruncationInconclusive,
  NoSignChange,
  SolverFailed,
  BankruptTrajectory,
  NonpositiveReturn,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stpete
