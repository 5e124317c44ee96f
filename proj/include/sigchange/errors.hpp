#ifndef SIGCHANGE_ERRORS_HPP
#define SIGCHANGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sigchange {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (e.g. t <= -1 for the temporal function).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller-side contract was violated (bad tolerance, non-null vector, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Eigen-solver failure, step underflow and similar numerical breakdowns.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A model evaluator produced a non-finite component.
class EvaluationError : public Error {
 public:
  EvaluationError(int row, int col, const std::string& what)
      : Error(what), row_(row), col_(col) {}
  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  int row_;
  int col_;
};

/// Jacobian of an embedding lost column rank.
class ImmersionError : public Error {
 public:
  ImmersionError(int rank, const std::string& what) : Error(what), rank_(rank) {}
  int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

/// Event outside the Misner covering region y1 - tau > 0.
class RegionError : public Error {
 public:
  RegionError(double tau, double y1, const std::string& what)
      : Error(what), tau_(tau), y1_(y1) {}
  double tau() const noexcept { return tau_; }
  double y1() const noexcept { return y1_; }

 private:
  double tau_;
  double y1_;
};

/// Iterative method did not converge within its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at (or past) the pole of the hyperbola parameterization.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The arc-length integral diverges at theta >= 1/sqrt(2).
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The requested operation needs something the map does not provide (an inverse).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Killing field vanishes (the fixed point of the boost action).
class DegenerateOrbitError : public Error {
 public:
  using Error::Error;
};

}  // namespace sigchange

#endif  // SIGCHANGE_ERRORS_HPP
