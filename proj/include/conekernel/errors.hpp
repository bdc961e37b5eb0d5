#pragma once

#include <stdexcept>
#include <string>

namespace conekernel {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested accuracy cannot be reached in double precision.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  /// Error bound that was actually attained.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// An iteration limit was hit before a certificate could be produced.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input to a harness routine (too few samples, bad grid, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters in a regime the asymptotic analysis does not cover.
class UnsupportedRegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace conekernel
