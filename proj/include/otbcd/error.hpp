#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otbcd {

enum class ErrorCode {
  kInvalidInstance,
  kInvalidConfig,
  kInvalidInput,
  kOracleUnsupported,
  kInvalidBasis,
  kInvalidPivot,
  kSuccessionViolation,
  kExactnessViolation,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace otbcd
