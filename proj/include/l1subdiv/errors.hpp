#pragma once

#include <stdexcept>
#include <string>

namespace l1subdiv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid scheme or fit configuration (degree, n, delta, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or insufficient input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A combination of options the library refuses to guess about.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Singular systems and other numerical breakdowns.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace l1subdiv
