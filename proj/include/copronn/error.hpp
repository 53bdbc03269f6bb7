#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace copronn {

enum class ErrorKind {
  DimensionMismatch,
  BadMagic,
  UnsupportedVersion,
  TruncatedPayload,
  NonFiniteValue,
  SchemaError,
  MissingFile,
  IoError,
  PartitionTooLarge,
  PreconditionFailed,
  DegenerateData,
  ZeroLogit,
  ZeroVector,
  UnknownClass,
  ClassSetMismatch,
  SpecError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the engine carries a kind so callers (and the CLI's
/// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace copronn
