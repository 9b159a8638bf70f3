#pragma once

#include <stdexcept>
#include <string>

namespace evac {

enum class ErrorKind {
  EmptyInput,
  RaggedRows,
  UnknownGlyph,
  NoOpenExit,
  UnreachablePatch,
  BadExitWidth,
  InvalidExitName,
  AllExitsBlocked,
  OutOfBounds,
  LambdaOutOfRange,
  InvalidConfig,
  BadRange,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every recoverable failure in the library is reported as an Error carrying
/// the kind, so callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace evac
