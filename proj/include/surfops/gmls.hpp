#pragma once

#include <Eigen/Core>

#include "surfops/weights.hpp"

namespace surfops {

struct GmlsConfig {
  int degree = 4;           // polynomial degree l (>= 1; >= 2 for Laplacians)
  int kernel_exponent = 2;  // m in the weight kernel
  double tau = 1.5;         // radius factor; per-stencil support rho = tau * h_max
};

// Compactly supported kernel (1 - r/rho)_+^{2m}.
double weight_kernel(double r, double rho, int m);

// Weighted least-squares derivative weights ("diffuse derivatives": the
// kernel is frozen at the stencil center, no kernel-derivative terms).
// Solved by QR of W^{1/2} P; requires n_i > L and a unisolvent stencil.
// Also fits the Monge heights with the same factorization.
StencilWeights gmls_derivative_weights(const ProjectedStencil& proj,
                                       const GmlsConfig& config);

// Fitted Monge-patch gradient at the origin (used for frame refinement).
Eigen::Vector2d gmls_monge_gradient(const ProjectedStencil& proj,
                                    const GmlsConfig& config);

// Metric tensor of the fitted Monge patch and the coefficients of the
// expanded surface Laplacian: laplacian_coeffs lists the multipliers of
// (c_x, c_y, c_xx, c_xy, c_yy). With a flat fit they are (0,0,1,0,1).
struct MetricTerms {
  Eigen::Matrix2d metric;   // G
  Eigen::Matrix2d inverse;  // G^{-1}
  double det = 1.0;         // |g|
  std::array<double, 5> laplacian_coeffs{0, 0, 1, 0, 1};
};

MetricTerms metric_terms(const MongeDerivs& monge);

// Local-coordinate SDO rows: gradient and divergence contract the metric
// blocks with the frame rotation; the Laplacian combines the derivative
// weights with the expanded-formula coefficients (metric terms are always
// used, even when the frame is exact).
SdoRows gmls_sdo_weights(const StencilWeights& weights, SdoKind kind);

}  // namespace surfops
