#pragma once

#include <stdexcept>
#include <string>

namespace col {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OutsideSet : public Error {
 public:
  using Error::Error;
};

// An iterative oracle hit its iteration cap; usually a sign of mis-specified
// regularity constants.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class NoCertifiedRoute : public Error {
 public:
  using Error::Error;
};

class GridUnsupported : public Error {
 public:
  using Error::Error;
};

class MissingCertificate : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace col
