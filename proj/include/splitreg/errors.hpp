#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitreg {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition (range, shape, coverage, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A design column has (numerically) zero variation and cannot be standardized.
class DegenerateColumnError : public Error {
 public:
  DegenerateColumnError(int column, const std::string& what)
      : Error(what), column(column) {}
  int column;
};

/// A matrix that must be inverted is singular or too ill-conditioned.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double rcond)
      : Error(what), rcond(rcond) {}
  double rcond;
};

/// An iterative solver hit its sweep limit; carries the last iterate for diagnosis.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<Eigen::VectorXd> last_iterate,
                   double last_change)
      : Error(what), last_iterate(std::move(last_iterate)), last_change(last_change) {}
  std::vector<Eigen::VectorXd> last_iterate;
  double last_change;
};

/// A partition enumeration would exceed the requested cap; carries the exact count.
class TooManySplitsError : public Error {
 public:
  TooManySplitsError(const std::string& what, std::string count, long long cap)
      : Error(what), count(std::move(count)), cap(cap) {}
  std::string count;  // decimal digits; may exceed any machine integer
  long long cap;
};

/// Data generation failed (degenerate sample or a target matrix that is not PD).
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// A config file or CLI usage problem.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace splitreg
