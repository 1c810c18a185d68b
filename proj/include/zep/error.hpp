#pragma once

#include <stdexcept>
#include <string>

namespace zep {

enum class ErrorCode {
  Io,
  MalformedHeader,
  UnsupportedMaxval,
  Truncated,
  InvalidArgument,
  OutOfBounds,
  DimensionMismatch,
  Divergence,
  Version,
  Malformed,
  NoCandidates,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code so
/// callers (and tests) can tell e.g. a truncated PGM from a bad header.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zep
