#pragma once

#include <stdexcept>
#include <string>

namespace relmonad {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (category, presheaf, profunctor, instance files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Arity or slot-type mismatch when building or evaluating maps and cells.
class TypeMismatch : public Error {
 public:
  using Error::Error;
};

/// A configured resource bound (coend size, enumeration budget) was hit.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace relmonad
