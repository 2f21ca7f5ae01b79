#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mrfsdp {

enum class ErrorKind {
  InvalidInput,
  Infeasible,
  Numerical,
  SizeRefusal,
  DegenerateStep,
};

/// Base class for every error raised by the library. The kind maps onto the
/// CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& what)
      : Error(ErrorKind::InvalidInput, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what)
      : Error(ErrorKind::Infeasible, what) {}
};

class SizeRefusalError : public Error {
 public:
  explicit SizeRefusalError(const std::string& what)
      : Error(ErrorKind::SizeRefusal, what) {}
};

class DegenerateStepError : public Error {
 public:
  explicit DegenerateStepError(const std::string& what)
      : Error(ErrorKind::DegenerateStep, what) {}
};

/// Raised when an objective or iterate becomes non-finite. Carries the last
/// iterate that was still finite.
class NumericalFailureError : public Error {
 public:
  NumericalFailureError(const std::string& what, Eigen::MatrixXd last_point)
      : Error(ErrorKind::Numerical, what), last_point_(std::move(last_point)) {}

  const Eigen::MatrixXd& last_point() const noexcept { return last_point_; }

 private:
  Eigen::MatrixXd last_point_;
};

/// Process exit code associated with an error kind.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Infeasible:
      return 2;
    case ErrorKind::Numerical:
    case ErrorKind::DegenerateStep:
      return 3;
    case ErrorKind::SizeRefusal:
      return 4;
  }
  return 1;
}

}  // namespace mrfsdp
