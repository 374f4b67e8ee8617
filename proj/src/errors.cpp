#include "widthlab/errors.hpp"

namespace widthlab {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::schema: return "schema";
    case ErrorCode::domain: return "domain";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::unsupported_regime: return "unsupported_regime";
    case ErrorCode::size_limit: return "size_limit";
    case ErrorCode::allocation: return "allocation";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::input: return "input";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace widthlab
