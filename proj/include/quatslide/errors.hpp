#pragma once

#include <stdexcept>
#include <string>

namespace quatslide {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateQuaternion : public Error {
 public:
  using Error::Error;
};

class DegenerateAxis : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericalDivergence : public Error {
 public:
  using Error::Error;
};

// Raised when cond(J) exceeds the configured abort threshold.
class SingularJacobian : public Error {
 public:
  SingularJacobian(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class UnreachableTrajectory : public Error {
 public:
  using Error::Error;
};

// Invalid model, scenario, or configuration content.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace quatslide
