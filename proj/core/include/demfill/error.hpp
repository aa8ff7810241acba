#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace demfill {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input data: malformed files, shape mismatches,
/// masks with no known pixels and similar.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A parse failure at a specific line of a text input.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Numerical failure: solver non-convergence, ill-posed systems, non-finite
/// losses during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace demfill
