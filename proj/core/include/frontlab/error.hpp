#pragma once

#include <stdexcept>
#include <string>

namespace frontlab {

// Bad input: malformed configuration, violated preconditions, out-of-table queries.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed: no bracket, stagnation, violated discrete bounds.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace frontlab
