#pragma once

#include <stdexcept>
#include <string>

namespace surfops {

// Polynomial block of a stencil is rank deficient (stencil not unisolvent
// for the requested degree).
class UnisolvencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Stencil has too few points for the requested degree; raising the radius
// factor tau usually fixes this.
class StencilSizeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Stencil geometry does not determine a tangent plane (collinear points,
// nonpositive metric determinant, ...).
class DegenerateGeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed node or operator file.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace surfops
