#pragma once

#include <stdexcept>
#include <string>

namespace film {

// Input shapes are inconsistent (matrix vs weight vector, X rows vs Z rows, ...).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input values violate a contract (weights not summing to one, constant
// column, non-finite entries, zero contingency margin, ...).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The optimisation problem has no usable solution (operator numerically zero).
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An alternating loop exhausted its iteration budget.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& msg, int rank_, double last_delta_)
      : std::runtime_error(msg), rank(rank_), last_delta(last_delta_) {}
  int rank;
  double last_delta;
};

// A file could not be parsed; message carries file name and line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace film
