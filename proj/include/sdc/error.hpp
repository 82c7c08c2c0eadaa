#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdc {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A pivot fell below the relative singularity threshold.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class ResampleExhausted : public Error {
 public:
  ResampleExhausted(std::size_t column, int attempts)
      : Error("zero-forcing: " + std::to_string(attempts) +
              " consecutive singular subset draws for column " + std::to_string(column)),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class Infeasible : public Error {
 public:
  Infeasible(std::size_t column, const std::string& what)
      : Error("column " + std::to_string(column) + ": " + what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

// Exhaustive enumeration guard tripped.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class KindMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace sdc
