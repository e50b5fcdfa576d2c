#pragma once

#include <stdexcept>
#include <string>

namespace johnwalk {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad caller data: shapes, non-finite entries, points outside the body.
class InputError : public Error {
  public:
    using Error::Error;
};

// A computation that could not be completed to the requested accuracy.
class NumericalError : public Error {
  public:
    using Error::Error;
};

class UnboundedError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

} // namespace johnwalk
