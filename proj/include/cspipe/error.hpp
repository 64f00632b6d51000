#pragma once

#include <stdexcept>
#include <string>

namespace cspipe {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (files, corpora, model containers).
class DataError : public Error {
 public:
  using Error::Error;
};

// A precondition on arguments was violated (dimension mismatch, bad index).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Text format error carrying the 1-based line number it was found on.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cspipe
