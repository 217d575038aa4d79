#pragma once

#include <stdexcept>
#include <string>

namespace rlasso {

enum class ErrorCode {
  kDimensionMismatch,
  kNonFinite,
  kRankDeficient,
  kInvalidArgument,
  kDomainError,
  kInvalidRule,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rlasso
