#pragma once

#include <stdexcept>
#include <string>

namespace polypack {

enum class ErrorKind {
  Syntax,
  UnknownIdentifier,
  NonAffine,
  Arity,
  Unbounded,
  PeriodicCount,
  ProjectionBlocked,
  DegreeOverflow,
  Domain,
  NonIntegral,
  IndexOutOfRange,
  Binding,
  Overflow,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base exception for every diagnostic raised by the library. The kind lets
/// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, const std::string& message, int line, int column)
      : Error(kind, "line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace polypack
