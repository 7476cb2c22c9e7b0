#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "surfops/geometry.hpp"
#include "surfops/spatial.hpp"

namespace surfops {

enum class FrameProvenance { Exact, Pca, Refined };

// Orthonormal frame at a surface point: two tangents and the normal.
struct TangentFrame {
  Vec3 xi1 = Vec3::UnitX();
  Vec3 xi2 = Vec3::UnitY();
  Vec3 eta = Vec3::UnitZ();
  FrameProvenance provenance = FrameProvenance::Pca;

  // R = [xi1 xi2 eta]
  Eigen::Matrix3d rotation() const {
    Eigen::Matrix3d r;
    r.col(0) = xi1;
    r.col(1) = xi2;
    r.col(2) = eta;
    return r;
  }
};

// Stencil expressed in the frame's local coordinates: the center maps to
// (0,0) with height 0, member j to (coords[j], heights[j]) = R^T (x_j - x_i).
struct ProjectedStencil {
  Stencil stencil;
  TangentFrame frame;
  std::vector<Eigen::Vector2d> coords;
  std::vector<double> heights;

  int size() const { return static_cast<int>(coords.size()); }
};

TangentFrame exact_frame(const SurfaceModel& surface, const Vec3& x);

// Coarse tangent estimate: eigenvectors of the stencil covariance. The two
// dominant directions become the tangents, the least the normal. If a
// surface is given the normal sign is aligned with the exact outward normal
// (sign only; it does not affect assembled operators).
TangentFrame pca_frame(const std::vector<Vec3>& points, const Stencil& stencil,
                       const SurfaceModel* orient = nullptr);

ProjectedStencil project(const std::vector<Vec3>& points, const Stencil& stencil,
                         const TangentFrame& frame);

// Fits the Monge height data of a projected stencil and returns the fitted
// surface gradient (f_x, f_y) at the origin. Both methods provide one.
using MongeGradientFn = std::function<Eigen::Vector2d(const ProjectedStencil&)>;

// Tangent refinement: re-project, fit the Monge patch, tilt the frame so its
// normal matches the fitted patch normal, Gram-Schmidt the old tangents
// against it. One pass by default.
TangentFrame refine_frame(const std::vector<Vec3>& points, const Stencil& stencil,
                          const TangentFrame& coarse, const MongeGradientFn& fit,
                          int passes = 1);

}  // namespace surfops
