#include "surfops/localframe.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "surfops/errors.hpp"

namespace surfops {

TangentFrame exact_frame(const SurfaceModel& surface, const Vec3& x) {
  TangentFrame frame;
  frame.eta = surface.exact_normal(x);
  frame.provenance = FrameProvenance::Exact;
  if (surface.kind() == SurfaceKind::Torus) {
    // azimuthal direction is tangent everywhere on a surface of revolution
    frame.xi1 = Vec3(-x.y(), x.x(), 0.0).normalized();
  } else {
    Vec3 seed = std::abs(frame.eta.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    frame.xi1 = seed.cross(frame.eta).normalized();
  }
  frame.xi2 = frame.eta.cross(frame.xi1);
  return frame;
}

TangentFrame pca_frame(const std::vector<Vec3>& points, const Stencil& stencil,
                       const SurfaceModel* orient) {
  if (stencil.size() < 3)
    throw DegenerateGeometryError("pca frame needs at least 3 stencil points");

  Vec3 mean = Vec3::Zero();
  for (int id : stencil.indices) mean += points[id];
  mean /= stencil.size();

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int id : stencil.indices) {
    const Vec3 d = points[id] - mean;
    cov += d * d.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d& ev = eig.eigenvalues();  // ascending
  if (!(ev[1] > 1e-12 * std::max(ev[2], 1e-300)))
    throw DegenerateGeometryError("collinear stencil: covariance rank below 2");

  TangentFrame frame;
  frame.provenance = FrameProvenance::Pca;
  frame.xi1 = eig.eigenvectors().col(2);
  frame.xi2 = eig.eigenvectors().col(1);
  frame.eta = eig.eigenvectors().col(0);
  // keep the frame right-handed
  if (frame.xi1.cross(frame.xi2).dot(frame.eta) < 0.0) frame.xi2 = -frame.xi2;
  if (orient != nullptr) {
    const Vec3 exact = orient->exact_normal(points[stencil.center]);
    if (frame.eta.dot(exact) < 0.0) {
      frame.eta = -frame.eta;
      frame.xi2 = -frame.xi2;
    }
  }
  return frame;
}

ProjectedStencil project(const std::vector<Vec3>& points, const Stencil& stencil,
                         const TangentFrame& frame) {
  ProjectedStencil proj;
  proj.stencil = stencil;
  proj.frame = frame;
  proj.coords.reserve(stencil.size());
  proj.heights.reserve(stencil.size());
  const Vec3& center = points[stencil.center];
  for (int id : stencil.indices) {
    const Vec3 d = points[id] - center;
    proj.coords.emplace_back(frame.xi1.dot(d), frame.xi2.dot(d));
    proj.heights.push_back(frame.eta.dot(d));
  }
  return proj;
}

TangentFrame refine_frame(const std::vector<Vec3>& points, const Stencil& stencil,
                          const TangentFrame& coarse, const MongeGradientFn& fit,
                          int passes) {
  if (passes < 0) throw std::invalid_argument("refinement pass count must be >= 0");
  TangentFrame frame = coarse;
  for (int pass = 0; pass < passes; ++pass) {
    const ProjectedStencil proj = project(points, stencil, frame);
    const Eigen::Vector2d g = fit(proj);

    // normal of the fitted patch, rotated back to world coordinates
    const double norm = std::sqrt(1.0 + g.squaredNorm());
    const Vec3 eta = (frame.xi1 * (-g.x()) + frame.xi2 * (-g.y()) + frame.eta) / norm;

    Vec3 xi1 = frame.xi1 - eta * eta.dot(frame.xi1);
    if (xi1.norm() < 1e-8) xi1 = frame.xi2 - eta * eta.dot(frame.xi2);
    xi1.normalize();
    Vec3 xi2 = frame.xi2 - eta * eta.dot(frame.xi2) - xi1 * xi1.dot(frame.xi2);
    if (xi2.norm() < 1e-8) xi2 = eta.cross(xi1);
    xi2.normalize();

    frame.xi1 = xi1;
    frame.xi2 = xi2;
    frame.eta = eta;
    frame.provenance = FrameProvenance::Refined;
  }
  return frame;
}

}  // namespace surfops
