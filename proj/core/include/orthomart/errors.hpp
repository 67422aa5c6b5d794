#pragma once

#include <stdexcept>
#include <string>

namespace orthomart {

/// Two objects that must share an ambient dimension (or channel count) do not.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input lies outside the domain an operation is defined on
/// (non-adapted field where adaptedness is required, q out of range, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A lattice or table would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sample lattice does not cover the sites an evaluation needs.
class MarginError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace orthomart
