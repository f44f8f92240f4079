#pragma once

#include <stdexcept>
#include <string>

namespace grfkit {

/// Desk-scale limit exceeded (dimension, order, norm exponent, Gram size).
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature order too low for the requested truncation order; the
/// transform refuses rather than aliasing high modes into low ones.
class AliasingError : public std::invalid_argument {
 public:
  explicit AliasingError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace grfkit
