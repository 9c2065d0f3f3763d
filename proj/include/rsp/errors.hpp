#ifndef RSP_ERRORS_HPP
#define RSP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsp {

// Base for every failure raised by the library. The CLI maps the two
// families below onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejected input or a protocol precondition that does not hold (exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidState : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The resource state is too weakly entangled for the requested preparation.
class InsufficientEntanglement : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// r1 is at (or below) the floor where diag(1/r0, 1/r1) stops being bounded.
class UnentangledResource : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegeneracyError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Malformed file content or an I/O failure (exit code 3).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsp

#endif  // RSP_ERRORS_HPP
