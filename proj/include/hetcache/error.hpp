#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hetcache {

enum class ErrorKind {
  OutOfRange,
  InvalidArgument,
  ComplexityGuard,
  Degenerate,
  DecodeFailure,
  Unsupported,
  SamplingFailure,
  ConfigError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ComplexityGuard: return "ComplexityGuard";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::DecodeFailure: return "DecodeFailure";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::SamplingFailure: return "SamplingFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to a stable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace hetcache
