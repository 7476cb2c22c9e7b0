#pragma once

#include <Eigen/Core>

#include "surfops/weights.hpp"

namespace surfops {

struct RbffdConfig {
  int degree = 4;   // augmented polynomial degree l
  int kappa = -1;   // PHS exponent, phi(r) = r^{2*kappa+1}; -1 means kappa = degree
  double tau = 1.5;

  int resolved_kappa() const { return kappa < 0 ? degree : kappa; }
};

// phi(r) = r^{2*kappa+1}
double phs_kernel(double r, int kappa);

// Row of d_op phi(|x - x_j|) evaluated at the origin over the stencil.
// Second-order ops require kappa >= 1 (second derivatives of r are singular
// at 0); the center entry uses the symmetric limit 0.
Eigen::VectorXd phs_derivative_row(const ProjectedStencil& proj, int kappa, Deriv op);

// PHS+Poly interpolant of data over a projected stencil (kernel expansion
// plus polynomial tail under moment conditions). Coefficients live in the
// h_max-scaled coordinates.
struct PhsInterpolant {
  Eigen::VectorXd kernel_coeffs;  // a
  Eigen::VectorXd poly_coeffs;    // b
  std::vector<Eigen::Vector2d> scaled_nodes;
  double scale = 1.0;
  int degree = 2;
  int kappa = 2;

  double value(const Eigen::Vector2d& xy) const;  // xy in unscaled coordinates
  Eigen::Vector2d gradient_at_origin() const;
};

PhsInterpolant rbffd_interpolate(const ProjectedStencil& proj, const RbffdConfig& config,
                                 const Eigen::VectorXd& values);

// Stencil weights from one LU factorization of the (n_i+L) x (n_i+L) saddle
// system with five derivative right-hand sides; the polynomial multipliers
// are discarded. Monge derivatives come from applying the weights to the
// height data (the saddle matrix is symmetric).
StencilWeights rbffd_derivative_weights(const ProjectedStencil& proj,
                                        const RbffdConfig& config);

Eigen::Vector2d rbffd_monge_gradient(const ProjectedStencil& proj,
                                     const RbffdConfig& config);

// Tangent-plane SDO rows: gradient R*(c_x, c_y, 0), divergence the
// transpose contraction, Laplacian c_xx + c_yy. No metric terms.
SdoRows rbffd_sdo_weights(const StencilWeights& weights, SdoKind kind);

}  // namespace surfops
