#pragma once

#include <stdexcept>
#include <string>

namespace rankreg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: empty samples, non-finite values, out-of-range
/// parameters, mismatched shapes.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Input is well formed but carries no information for the requested
/// statistic (e.g. every value tied).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// The least-squares design is numerically singular.
class SingularDesign : public Error {
 public:
  SingularDesign(const std::string& what, long column)
      : Error(what), column_(column) {}
  /// Index of the column detected as linearly dependent, -1 if unknown.
  long column() const noexcept { return column_; }

 private:
  long column_;
};

/// A regularity condition of the model fails on the data, e.g. the rank of
/// x is a linear combination of the covariates.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class CalibrationFailure : public Error {
 public:
  using Error::Error;
};

/// Too many bootstrap resamples had to be discarded.
class ResamplingFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace rankreg
