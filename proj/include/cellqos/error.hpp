#pragma once

#include <stdexcept>
#include <string>

namespace cellqos {

/// Invalid parameters or malformed input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A layout with no base station reached an operation that needs one.
class DegenerateLayoutError : public Error {
 public:
  DegenerateLayoutError() : Error("layout has no base station") {}
};

}  // namespace cellqos
