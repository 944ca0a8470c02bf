#pragma once

#include <stdexcept>
#include <string>

namespace saea {

enum class ErrorCode {
  kInvalidArgument = 1,
  kUnsupported,
  kNumericalFailure,
  kBudgetExceeded,
  kIoError,
  kConfigError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C boundary can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) raise(ErrorCode::kInvalidArgument, what);
}

}  // namespace saea
