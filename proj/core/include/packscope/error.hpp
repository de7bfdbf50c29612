#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace packscope {

enum class ErrorCode {
  EmptyInput,
  InputTooLarge,
  IoError,
  FormatError,
  InvalidParams,
  EmptyTrainingSet,
  KTooLarge,
  NonBinaryLabels,
  NonFiniteLoss,
  DimensionMismatch,
  VersionMismatch,
  CorruptModel,
  SizeTooSmall,
  EmptyPayload,
  ClassTooSmall,
  SingleClassInput,
  NonBinaryValue,
  EmptyMatrix,
  ScoreOutOfRange,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace packscope
