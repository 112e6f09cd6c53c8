#pragma once

#include <stdexcept>
#include <string>

namespace forest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a precondition (bad parameter, wrong shape, k > N, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is unusable: unreadable file, malformed manifest, single-label dataset.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is singular, or an estimator hit a constant sample.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace forest
