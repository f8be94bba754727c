#pragma once

#include <stdexcept>
#include <string>

namespace qhit {

enum class ErrorKind {
  InvalidParameter,
  DimensionMismatch,
  IntegrationFailure,
  CapExceeded,
  NoConvergence,
  FitError,
  InvalidWindow,
  ParseError,
  MaskError,
  DegenerateImage,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::IntegrationFailure: return "integration-failure";
    case ErrorKind::CapExceeded: return "cap-exceeded";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::FitError: return "fit-error";
    case ErrorKind::InvalidWindow: return "invalid-window";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::MaskError: return "mask-error";
    case ErrorKind::DegenerateImage: return "degenerate-image";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the ErrorKind classes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse errors additionally record the 1-based input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace qhit
