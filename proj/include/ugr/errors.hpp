#pragma once

#include <stdexcept>
#include <string>

namespace ugr {

// Exit-code category used by the CLI: bad input is a user error (1),
// failed numerics are reported separately (2).
enum class ErrorKind { user = 1, numerical = 2 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Argument or data outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::user, what) {}
};

// Fewer observations/records than the operation requires.
class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what) : Error(ErrorKind::user, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorKind::user, what) {}
};

// A quantile table does not contain the probability needed for an interval.
class MissingQuantileError : public Error {
 public:
  explicit MissingQuantileError(const std::string& what) : Error(ErrorKind::user, what) {}
};

// Numerical conditioning failure (non-PD matrix, destroyed cancellation, ...).
class ConditioningError : public Error {
 public:
  explicit ConditioningError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class OptimizationError : public Error {
 public:
  explicit OptimizationError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

// A scale interval bound whose denominator 1 + sqrt(V)*T(p) is not positive.
class UndefinedBoundError : public Error {
 public:
  UndefinedBoundError(const std::string& what, double offending_quantile)
      : Error(ErrorKind::numerical, what), offending_quantile_(offending_quantile) {}
  double offending_quantile() const noexcept { return offending_quantile_; }

 private:
  double offending_quantile_;
};

}  // namespace ugr
