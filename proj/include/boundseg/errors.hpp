#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boundseg {

/// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (corpus files, model files, support files).
/// Carries the source name and 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Incompatible pairing of inputs: channel vs. stats, model vs. sentence,
/// gold vs. predicted corpus shapes.
class MismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace boundseg
