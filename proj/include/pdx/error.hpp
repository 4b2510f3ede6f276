#pragma once

#include <stdexcept>
#include <string>

namespace pdx {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong" catch this; the subclasses carry the kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched or empty dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the documented domain of an operation (k > d, mu <= 0,
// theorem hypotheses violated, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// NaN / Inf produced during an iteration.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, long iteration = -1)
      : Error(iteration >= 0 ? what + " (iteration " + std::to_string(iteration) + ")"
                             : what),
        iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

// Malformed files and configs.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdx
