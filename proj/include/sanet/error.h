#ifndef SANET_ERROR_H
#define SANET_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace sanet {

enum class ErrorCode {
  kInvalidArgument,
  kTimeOverflow,
  kCapacityExhausted,
  kFieldOverflow,
  kSinkUnavailable,
  kUnknownRegister,
  kIndexOutOfRange,
  kValueOutOfRange,
  kUnsortedTrace,
  kOverlappingPortSets,
  kSchemaMismatch,
  kMissingLabel,
  kIoFailure,
  kClassTooSmall,
  kLengthMismatch,
  kSingleClassOnly,
  kDimensionMismatch,
  kParseFailure,
  kConfigInvalid,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as Error; the code identifies the
// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sanet

#endif  // SANET_ERROR_H
