#pragma once

#include <stdexcept>
#include <string>

namespace anisoflow {

// Argument outside the domain where the integrand or barrier is smooth
// (covector at the origin, non-positive time).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The integrand fails a structural property it must have (e.g. uniform
// convexity) for a computation to be meaningful.
class IntegrandInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A theorem hypothesis does not hold for the integrand at hand.
class HypothesisNotMet : public std::runtime_error {
 public:
  HypothesisNotMet(std::string condition, const std::string& detail)
      : std::runtime_error("hypothesis not met: " + condition + " (" + detail + ")"),
        condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

// A sampled constant did not stabilise within the search budget.
class UnresolvedConstant : public std::runtime_error {
 public:
  UnresolvedConstant(const std::string& what, double lower_bound)
      : std::runtime_error(what), lower_bound_(lower_bound) {}

  double lower_bound() const noexcept { return lower_bound_; }

 private:
  double lower_bound_;
};

class StepRejected : public std::runtime_error {
 public:
  StepRejected(const std::string& what, double admissible_dt)
      : std::runtime_error(what), admissible_dt_(admissible_dt) {}

  double admissible_dt() const noexcept { return admissible_dt_; }

 private:
  double admissible_dt_;
};

class BlowUp : public std::runtime_error {
 public:
  BlowUp(const std::string& what, double time) : std::runtime_error(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace anisoflow
