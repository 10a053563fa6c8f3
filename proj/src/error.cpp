#include "otbcd/error.hpp"

namespace otbcd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInstance:
      return "InvalidInstance";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kInvalidInput:
      return "InvalidInput";
    case ErrorCode::kOracleUnsupported:
      return "OracleUnsupported";
    case ErrorCode::kInvalidBasis:
      return "InvalidBasis";
    case ErrorCode::kInvalidPivot:
      return "InvalidPivot";
    case ErrorCode::kSuccessionViolation:
      return "SuccessionViolation";
    case ErrorCode::kExactnessViolation:
      return "ExactnessViolation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace otbcd
