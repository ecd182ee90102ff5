#pragma once

#include <stdexcept>
#include <string>

namespace svarkit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad cells, gaps, unknown names).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A computation could not be carried out (non-PD matrix, singular system,
/// optimizer failure).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace svarkit
