#include "rlasso/error.hpp"

namespace rlasso {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kInvalidRule: return "InvalidRule";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace rlasso
