#pragma once

#include <stdexcept>
#include <string>

namespace topoplasma {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error {
  using Error::Error;
};

// Operation is not defined for the given parameters (e.g. phase boundary).
struct NotApplicable : Error {
  using Error::Error;
};

struct NumericalFailure : Error {
  using Error::Error;
};

// Grid too coarse to resolve the requested quantity.
struct ResolutionError : Error {
  using Error::Error;
};

}  // namespace topoplasma
