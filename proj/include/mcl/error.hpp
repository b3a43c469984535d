#pragma once

#include <stdexcept>
#include <string>

namespace mcl {

// Every failure raised by the library derives from Error. The CLI maps the
// categories onto exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : NumericalError(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Malformed episode files. `offset` is a 1-based line for text files and a
// byte offset for binary ones.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, long offset = -1) : Error(what), offset_(offset) {}

  long offset() const noexcept { return offset_; }

 private:
  long offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcl
