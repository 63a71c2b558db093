#pragma once

#include <stdexcept>
#include <string>

namespace mema {

/// Raised for invalid inputs and violated preconditions across the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Analytic IO formulas are only exact when every tile dimension divides the
/// corresponding problem dimension.
class NonDivisibleError : public Error {
 public:
  NonDivisibleError() : Error("requires divisible tiling") {}
};

/// The closed-form M-first inequalities cannot be rearranged because a
/// denominator is non-positive.
class DegenerateConditionError : public Error {
 public:
  DegenerateConditionError()
      : Error("condition degenerate; fall back to direct comparison") {}
};

}  // namespace mema
