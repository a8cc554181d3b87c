#pragma once

#include <stdexcept>
#include <string>

namespace qtheta {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different coefficient rings.
class RingMismatch : public Error {
 public:
  using Error::Error;
};

/// Precondition on the mathematical input violated (non-unit constant term,
/// negative exponent in a generator, non-prime modulus, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A comparison or evaluation asked for coefficients beyond the window that
/// is guaranteed to be correct.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// Syntax error with a 0-based character position (or line number for
/// line-oriented formats).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace qtheta
