#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (dimension mismatch, bad range).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// An algorithm needed more operator applications than its budget allows.
class BudgetExhausted : public Error {
public:
  using Error::Error;
};

/// An iterative solver failed to reach its tolerance.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Malformed input file; the message carries the offending line number.
class ParseError : public Error {
public:
  ParseError(const std::string &what, long line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  long line() const { return line_; }

private:
  long line_;
};

} // namespace sde
