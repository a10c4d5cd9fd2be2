#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ifs_chisel {

// Base for every failure raised by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularSystem : public Error {
public:
  using Error::Error;
};

class InvalidRatio : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class NotAContraction : public Error {
public:
  NotAContraction(std::size_t index, double ratio)
      : Error("map " + std::to_string(index) +
              " is not a contraction (ratio " + std::to_string(ratio) + ")"),
        index_(index), ratio_(ratio) {}

  std::size_t index() const noexcept { return index_; }
  double ratio() const noexcept { return ratio_; }

private:
  std::size_t index_;
  double ratio_;
};

class EmptySystem : public Error {
public:
  EmptySystem() : Error("iterated function system has no maps") {}
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

class UnknownName : public Error {
public:
  using Error::Error;
};

class DegenerateRegion : public Error {
public:
  using Error::Error;
};

class EmptyRaster : public Error {
public:
  using Error::Error;
};

class GridMismatch : public Error {
public:
  using Error::Error;
};

class ResourceLimit : public Error {
public:
  using Error::Error;
};

class NonInvertibleMap : public Error {
public:
  using Error::Error;
};

class EmptyStage : public Error {
public:
  using Error::Error;
};

class IoFailure : public Error {
public:
  using Error::Error;
};

} // namespace ifs_chisel
