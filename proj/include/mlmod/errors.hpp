#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mlmod {

// Malformed input text. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a model invariant (ranges, totality, sizes).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate estimates or parameters that make a formula undefined.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Documented limits (e.g. factorial enumeration beyond T=8).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlmod
