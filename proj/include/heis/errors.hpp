#pragma once

#include <stdexcept>
#include <string>

namespace heis {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct ResourceLimit : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct OutOfChart : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct CoverageError : Error {
  CoverageError(const std::string& what, int bucket) : Error(what), bucket(bucket) {}
  int bucket;
};

// Carries a smaller parameter that is expected to succeed.
struct ShrinkError : Error {
  ShrinkError(const std::string& what, double suggested) : Error(what), suggested(suggested) {}
  double suggested;
};

}  // namespace heis
