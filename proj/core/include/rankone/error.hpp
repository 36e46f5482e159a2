#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

enum class ErrorCode {
  kInvalidArgument,   // bad dimensions, violated preconditions, malformed input
  kRankDeficient,     // a factorization needed full column rank
  kSingular,          // numerically singular system without a fallback
  kNoConvergence,     // an iteration that must converge did not
  kBudgetExceeded,    // combinatorial work above the desk-scale guard
  kIo,                // unreadable or unwritable file
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace rankone
