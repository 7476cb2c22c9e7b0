#pragma once

#include <Eigen/Core>
#include <array>

#include "surfops/localframe.hpp"
#include "surfops/polybasis.hpp"

namespace surfops {

enum class SdoKind { Gradient, Divergence, Laplacian };

// Derivatives of the fitted Monge patch at the stencil center.
struct MongeDerivs {
  double fx = 0.0, fy = 0.0;
  double fxx = 0.0, fxy = 0.0, fyy = 0.0;
};

// Per-stencil derivative weight vectors (one entry per stencil member) plus
// the fitted Monge derivatives, ready for operator assembly.
struct StencilWeights {
  TangentFrame frame;
  Eigen::VectorXd cx, cy, cxx, cxy, cyy;
  MongeDerivs monge;

  const Eigen::VectorXd& weights(Deriv op) const {
    switch (op) {
      case Deriv::Dx: return cx;
      case Deriv::Dy: return cy;
      case Deriv::Dxx: return cxx;
      case Deriv::Dxy: return cxy;
      default: return cyy;
    }
  }
  Eigen::VectorXd& weights(Deriv op) {
    return const_cast<Eigen::VectorXd&>(std::as_const(*this).weights(op));
  }
};

// Assembly rows for one stencil. Laplacian uses rows[0]; gradient fills all
// three with the Cartesian output components; divergence fills all three
// with the Cartesian input components (summed on apply).
struct SdoRows {
  std::array<Eigen::VectorXd, 3> rows;
  int count = 1;
};

}  // namespace surfops
