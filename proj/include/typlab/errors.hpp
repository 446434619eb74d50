#pragma once

#include <stdexcept>
#include <string>

namespace typlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: wrong dimension, argument out of its domain, mismatch.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class UnsupportedOrder : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ResourceLimit : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Failures of a numerical procedure on otherwise valid-looking input.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Requested expectation value lies outside the open spectral range.
class OutOfRange : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularDeformation : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateSampling : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace typlab
