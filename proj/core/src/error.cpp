#include "rankone/error.hpp"

#include "rankone/types.hpp"

namespace rankone {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kRankDeficient: return "rank deficient";
    case ErrorCode::kSingular: return "singular system";
    case ErrorCode::kNoConvergence: return "no convergence";
    case ErrorCode::kBudgetExceeded: return "budget exceeded";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

const char* to_string(Field field) {
  return field == Field::kReal ? "real" : "complex";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rankone
