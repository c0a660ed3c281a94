#pragma once

#include <stdexcept>
#include <string>

namespace ewad {

// Base for all errors raised by the library.  Everything derives from
// std::runtime_error so callers can catch broadly; the CLI maps these to a
// single machine-parsable line on stderr.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invariant violation in an input object (shape mismatch, negative count,
// out-of-range parameter, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Malformed on-disk data.  Messages carry file name and 1-based line number.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// Iterative numerical routine failed to converge within its iteration cap.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(what) {}
};

}  // namespace ewad
