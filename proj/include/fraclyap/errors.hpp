#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fraclyap {

/// Malformed input: bad expression text, bad problem data, failed hypotheses
/// on the data. Maps to CLI exit code 2.
class SpecError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Expression syntax error. `offset` is the byte offset into the source text.
class ParseError : public SpecError {
public:
  ParseError(const std::string& what, std::size_t offset)
      : SpecError(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// Data violates a standing hypothesis (e.g. q < 0 where q >= 0 is required).
class HypothesisError : public SpecError {
public:
  using SpecError::SpecError;
};

/// Numerical failure. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Evaluation produced a non-finite or undefined value.
class DomainError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
  QuadratureError(const std::string& what, double best_estimate,
                  std::size_t subdivisions)
      : NumericalError(what), best_estimate_(best_estimate),
        subdivisions_(subdivisions) {}

  double best_estimate() const noexcept { return best_estimate_; }
  std::size_t subdivisions() const noexcept { return subdivisions_; }

private:
  double best_estimate_;
  std::size_t subdivisions_;
};

/// No sign change in a bracketing root search.
class BracketError : public NumericalError {
public:
  BracketError(const std::string& what, double f_lo, double f_hi)
      : NumericalError(what), f_lo_(f_lo), f_hi_(f_hi) {}

  double f_lo() const noexcept { return f_lo_; }
  double f_hi() const noexcept { return f_hi_; }

private:
  double f_lo_;
  double f_hi_;
};

/// Precondition violated by a caller (argument ordering, ranges).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace fraclyap
