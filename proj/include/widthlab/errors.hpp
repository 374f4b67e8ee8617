#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace widthlab {

/// Every failure surfaced by the library carries exactly one of these codes.
/// The numeric value doubles as the CLI exit status.
enum class ErrorCode : int {
  validation = 2,          // parameter invariants, hypotheses, ensemble outside M
  schema = 3,              // malformed JSON / CSV input
  domain = 4,              // formula applied outside its domain
  degenerate = 5,          // zero denominator / structural coefficient
  unsupported_regime = 6,  // no estimation route applies
  size_limit = 7,          // dimension or resolution cap exceeded
  allocation = 8,          // rank allocation infeasible
  numeric = 9,             // quadrature or iteration failure
  input = 10,              // missing data (derivatives, files)
  io = 11,                 // file write failure
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace widthlab
