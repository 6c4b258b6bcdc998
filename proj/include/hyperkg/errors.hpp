#pragma once

#include <stdexcept>
#include <string>

namespace hyperkg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of different dimension, or a vector whose length does not match
/// the object it is applied to.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of an operation (e.g. a point on or outside the
/// unit ball, a non-finite coordinate).
class DomainError : public Error {
 public:
  using Error::Error;
};

class CoincidentPointsError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing dataset input.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values produced during optimisation.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint vocabulary fingerprints differ from the dataset's.
class VocabMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperkg
