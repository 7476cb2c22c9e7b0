#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "surfops/errors.hpp"
#include "surfops/gmls.hpp"
#include "surfops/localframe.hpp"
#include "surfops/rbffd.hpp"

using namespace surfops;

namespace {

void check_orthonormal(const TangentFrame& frame) {
  const Eigen::Matrix3d r = frame.rotation();
  CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(std::abs(r.determinant()) - 1.0) <= 1e-12);
}

Stencil trivial_stencil(int n) {
  Stencil st;
  st.center = 0;
  for (int i = 0; i < n; ++i) st.indices.push_back(i);
  st.h_max = 1.0;
  return st;
}

}  // namespace

TEST_CASE("exact frames are orthonormal and tangent") {
  Rng rng(31);
  const SurfaceModel sphere(SurfaceKind::UnitSphere);
  const SurfaceModel torus(SurfaceKind::Torus);
  for (int trial = 0; trial < 25; ++trial) {
    const Vec3 xs = rng.unit_vector();
    TangentFrame fs = exact_frame(sphere, xs);
    check_orthonormal(fs);
    CHECK(fs.eta.dot(xs) == doctest::Approx(1.0));
    CHECK(fs.provenance == FrameProvenance::Exact);

    const double u = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double v = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double w = 1.0 + std::cos(v) / 3.0;
    const Vec3 xt(w * std::cos(u), w * std::sin(u), std::sin(v) / 3.0);
    TangentFrame ft = exact_frame(torus, xt);
    check_orthonormal(ft);
    CHECK(std::abs(ft.xi1.dot(torus.exact_normal(xt))) <= 1e-13);
    CHECK(std::abs(ft.xi2.dot(torus.exact_normal(xt))) <= 1e-13);
  }
  SUBCASE("poles fall back to a non-parallel seed") {
    TangentFrame f = exact_frame(sphere, Vec3(0, 0, -1));
    check_orthonormal(f);
  }
}

TEST_CASE("pca frame") {
  SUBCASE("planar stencil recovers the plane normal") {
    std::vector<Vec3> pts;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) pts.emplace_back(i, 0.7 * j, 0.0);
    TangentFrame f = pca_frame(pts, trivial_stencil(9));
    check_orthonormal(f);
    CHECK(std::abs(std::abs(f.eta.z()) - 1.0) <= 1e-12);
  }
  SUBCASE("sphere cap points toward the pole") {
    std::vector<Vec3> pts;
    Rng rng(32);
    pts.emplace_back(0, 0, 1);
    for (int i = 0; i < 12; ++i) {
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double theta = rng.uniform(0.05, 0.25);
      pts.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                       std::cos(theta));
    }
    const SurfaceModel sphere(SurfaceKind::UnitSphere);
    TangentFrame f = pca_frame(pts, trivial_stencil(13), &sphere);
    check_orthonormal(f);
    const double angle = std::acos(std::clamp(f.eta.dot(Vec3(0, 0, 1)), -1.0, 1.0));
    CHECK(angle <= 5.0 * std::numbers::pi / 180.0);
  }
  SUBCASE("three non-collinear points suffice") {
    std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    check_orthonormal(pca_frame(pts, trivial_stencil(3)));
  }
  SUBCASE("collinear stencils are rejected") {
    std::vector<Vec3> pts = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
    CHECK_THROWS_AS(pca_frame(pts, trivial_stencil(4)), DegenerateGeometryError);
  }
}

TEST_CASE("projection") {
  const SurfaceModel torus(SurfaceKind::Torus);
  PointCloud cloud = generate_poisson_torus(200, 7);
  KdTree tree(cloud.points);
  Stencil st = select_stencil(tree, cloud.points, 10, 9, 1.5);
  TangentFrame frame = exact_frame(torus, cloud.points[10]);
  ProjectedStencil proj = project(cloud.points, st, frame);

  SUBCASE("center lands exactly at the origin") {
    CHECK(proj.coords[0] == Eigen::Vector2d(0.0, 0.0));
    CHECK(proj.heights[0] == 0.0);
  }
  SUBCASE("round trip restores the members") {
    const Eigen::Matrix3d r = frame.rotation();
    for (int k = 0; k < proj.size(); ++k) {
      const Vec3 local(proj.coords[k].x(), proj.coords[k].y(), proj.heights[k]);
      const Vec3 back = cloud.points[10] + r * local;
      CHECK((back - cloud.points[st.indices[k]]).norm() <= 1e-13);
    }
  }
  SUBCASE("identity frame on a flat cloud keeps raw coordinates") {
    std::vector<Vec3> pts = {{0, 0, 0}, {0.5, 0.25, 0}, {-0.3, 0.4, 0}};
    TangentFrame id;
    ProjectedStencil flat = project(pts, trivial_stencil(3), id);
    CHECK(flat.coords[1] == Eigen::Vector2d(0.5, 0.25));
    CHECK(flat.heights[2] == 0.0);
  }
}

namespace {

MongeGradientFn mls_fitter(int degree) {
  return [degree](const ProjectedStencil& proj) {
    return gmls_monge_gradient(proj, GmlsConfig{degree, 2, 1.5});
  };
}

MongeGradientFn phs_fitter(int degree) {
  return [degree](const ProjectedStencil& proj) {
    return rbffd_monge_gradient(proj, RbffdConfig{degree, -1, 1.5});
  };
}

// small cap stencil on the unit sphere around the north pole
std::vector<Vec3> north_cap(int n, double extent, Rng& rng) {
  std::vector<Vec3> pts;
  pts.emplace_back(0, 0, 1);
  for (int i = 1; i < n; ++i) {
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double theta = rng.uniform(0.2, 1.0) * extent;
    pts.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                     std::cos(theta));
  }
  return pts;
}

double normal_angle(const TangentFrame& frame, const Vec3& reference) {
  return std::acos(std::clamp(std::abs(frame.eta.dot(reference)), -1.0, 1.0));
}

}  // namespace

TEST_CASE("frame refinement") {
  SUBCASE("planar data leaves the frame unchanged") {
    std::vector<Vec3> pts;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) pts.emplace_back(0.4 * i, 0.4 * j, 0.0);
    Stencil st = trivial_stencil(9);
    st.h_max = 0.4 * std::numbers::sqrt2;
    TangentFrame coarse;  // identity
    for (const auto& fit : {mls_fitter(2), phs_fitter(2)}) {
      TangentFrame refined = refine_frame(pts, st, coarse, fit);
      CHECK((refined.eta - Vec3(0, 0, 1)).norm() <= 1e-13);
      CHECK(refined.provenance == FrameProvenance::Refined);
    }
  }
  SUBCASE("paraboloid with identity frame keeps the normal") {
    // critical point of the fit must sit at the stencil center
    std::vector<Vec3> pts = {{0, 0, 0}};
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) {
        if (i == 0 && j == 0) continue;
        const double x = 0.3 * i, y = 0.3 * j;
        pts.emplace_back(x, y, x * x + y * y);
      }
    Stencil st = trivial_stencil(9);
    st.h_max = 0.3 * std::numbers::sqrt2;
    for (const auto& fit : {mls_fitter(2), phs_fitter(2)}) {
      TangentFrame refined = refine_frame(pts, st, TangentFrame{}, fit);
      CHECK((refined.eta - Vec3(0, 0, 1)).norm() <= 1e-12);
    }
  }
  SUBCASE("a perturbed sphere frame contracts toward the exact normal") {
    Rng rng(34);
    std::vector<Vec3> pts = north_cap(24, 0.15, rng);
    Stencil st = trivial_stencil(24);
    st.h_max = 0.15;

    const double tilt = 5.0 * std::numbers::pi / 180.0;
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(tilt, Vec3(1, 1, 0).normalized()).toRotationMatrix();
    TangentFrame coarse;
    coarse.xi1 = rot.col(0);
    coarse.xi2 = rot.col(1);
    coarse.eta = rot.col(2);

    const double before = normal_angle(coarse, Vec3(0, 0, 1));
    for (const auto& fit : {mls_fitter(2), phs_fitter(2)}) {
      TangentFrame refined = refine_frame(pts, st, coarse, fit);
      const double after = normal_angle(refined, Vec3(0, 0, 1));
      CHECK(after < before);
      check_orthonormal(refined);
    }
  }
  SUBCASE("pass count zero is the identity operation") {
    std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0.1}, {0, 1, 0.1}, {1, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {-1, -1, 0.05}};
    Stencil st = trivial_stencil(7);
    TangentFrame coarse;
    TangentFrame same = refine_frame(pts, st, coarse, mls_fitter(1), 0);
    CHECK(same.eta == coarse.eta);
    CHECK(same.provenance == coarse.provenance);
  }
}

TEST_CASE("tangent refinement converges with the stencil radius") {
  // normals from refined frames approach exact normals as the cap shrinks
  Rng rng(35);
  double prev = 1e9;
  for (double extent : {0.4, 0.2, 0.1}) {
    std::vector<Vec3> pts = north_cap(30, extent, rng);
    Stencil st = trivial_stencil(30);
    st.h_max = extent;
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(0.05, Vec3(0, 1, 0)).toRotationMatrix();
    TangentFrame coarse;
    coarse.xi1 = rot.col(0);
    coarse.xi2 = rot.col(1);
    coarse.eta = rot.col(2);
    TangentFrame refined = refine_frame(pts, st, coarse, phs_fitter(4));
    const double angle = normal_angle(refined, Vec3(0, 0, 1));
    CHECK(angle < prev);
    prev = angle;
  }
}

TEST_CASE("refined torus normals converge at high order under refinement") {
  // max angle between refined and exact normals over sampled nodes drops at
  // order >= l-1 as the cloud refines
  const SurfaceModel torus(SurfaceKind::Torus);
  std::vector<double> ns, max_angles;
  for (int n : {2038, 8153, 32615}) {
    PointCloud cloud = generate_poisson_torus(n, 42);
    KdTree tree(cloud.points);
    double worst = 0.0;
    for (int node = 0; node < cloud.size(); node += 17) {
      const Stencil st =
          select_stencil(tree, cloud.points, node, default_initial_size(4), 1.5);
      TangentFrame coarse = pca_frame(cloud.points, st, &torus);
      TangentFrame refined = refine_frame(cloud.points, st, coarse, phs_fitter(4));
      const Vec3 exact = torus.exact_normal(cloud.points[node]);
      worst = std::max(worst, normal_angle(refined, exact));
    }
    ns.push_back(n);
    max_angles.push_back(worst);
  }
  CHECK(max_angles[1] < max_angles[0]);
  CHECK(max_angles[2] < max_angles[1]);
  // slope of log(angle) against log(N^{-1/2}), same convention as fit_order
  const double beta = (std::log(max_angles[2]) - std::log(max_angles[0])) /
                      (-0.5 * (std::log(ns[2]) - std::log(ns[0])));
  CHECK(beta >= 3.0);
}
