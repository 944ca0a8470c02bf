#include "saea/error.hpp"

namespace saea {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kUnsupported:
      return "unsupported";
    case ErrorCode::kNumericalFailure:
      return "numerical-failure";
    case ErrorCode::kBudgetExceeded:
      return "budget-exceeded";
    case ErrorCode::kIoError:
      return "io-error";
    case ErrorCode::kConfigError:
      return "config-error";
  }
  return "unknown";
}

}  // namespace saea
