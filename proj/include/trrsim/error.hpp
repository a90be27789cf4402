#pragma once

#include <stdexcept>
#include <string>

namespace trrsim {

/// Base class for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration documents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A bank, row, or address outside the configured geometry.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A command that violates the DRAM command protocol (strict mode only).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A byte pattern that does not correspond to any defined encoding.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// An estimator was given too little signal to produce a result.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace trrsim
