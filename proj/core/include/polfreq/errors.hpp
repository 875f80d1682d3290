#pragma once

#include <stdexcept>
#include <string>

namespace polfreq {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller-supplied parameter violates a documented precondition.
struct InvalidParameter : Error {
  using Error::Error;
};

// Two states do not share a frequency grid (or are otherwise not comparable).
struct IncompatibleStates : Error {
  using Error::Error;
};

// A discretization is too coarse for the requested operation; carries the
// bin width that would be needed.
struct GridResolutionError : Error {
  double required_bin_width;
  GridResolutionError(const std::string& msg, double required)
      : Error(msg), required_bin_width(required) {}
};

// A numerical routine exhausted its budget; carries the best error estimate
// it achieved.
struct NumericFailure : Error {
  double achieved_error;
  NumericFailure(const std::string& msg, double achieved)
      : Error(msg), achieved_error(achieved) {}
};

// A nonlinear fit could not produce a usable result.
struct FitFailure : Error {
  using Error::Error;
};

}  // namespace polfreq
