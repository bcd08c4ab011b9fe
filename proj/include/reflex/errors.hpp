#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace reflex {

// Base class for all library errors. `code()` is a stable machine-readable
// tag; the CLI prints it on stderr as `error: <code>: <message>`.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Invalid physical input (non-positive mass, stiffness, ...). Degenerate
// inputs are rejected eagerly instead of propagating infinities.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Requested operation needs an invertible Jacobian but the configuration is
// at (or numerically indistinguishable from) a kinematic singularity.
class SingularConfiguration : public Error {
 public:
  explicit SingularConfiguration(const std::string& what)
      : Error("singular", what) {}
};

// Malformed input file. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = 0)
      : Error("parse", line > 0 ? what + " (line " + std::to_string(line) + ")"
                                : what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

// Trace analysis failures (no contact episode, ambiguous episodes, ...).
class TraceError : public Error {
 public:
  TraceError(std::string code, const std::string& what)
      : Error(std::move(code), what) {}
};

}  // namespace reflex
