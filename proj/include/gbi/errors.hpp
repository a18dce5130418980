#pragma once

#include <stdexcept>
#include <string>

namespace gbi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A variable name was not found, duplicated, or groups overlap.
class LabelError : public Error {
 public:
  using Error::Error;
};

/// Matrix shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the operation's domain (e.g. r <= 0, m < 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Singular or indefinite blocks, failed factorizations, missing brackets.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gbi
