#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "surfops/errors.hpp"
#include "surfops/rbffd.hpp"

using namespace surfops;

TEST_CASE("phs kernel and derivative rows") {
  CHECK(phs_kernel(2.0, 1) == 8.0);
  CHECK(phs_kernel(0.0, 3) == 0.0);
  CHECK_THROWS_AS(phs_kernel(-1.0, 1), std::invalid_argument);

  SUBCASE("first derivative closed form, kappa = 1") {
    ProjectedStencil proj;
    proj.stencil.center = 0;
    proj.stencil.h_max = 1.0;
    proj.coords = {{0.0, 0.0}, {0.3, 0.4}};
    proj.heights = {0.0, 0.0};
    proj.stencil.indices = {0, 1};
    Eigen::VectorXd row = phs_derivative_row(proj, 1, Deriv::Dx);
    CHECK(row[0] == 0.0);  // center limit
    CHECK(row[1] == doctest::Approx(-3.0 * 0.3 * 0.5).epsilon(1e-15));
  }
  SUBCASE("Laplacian of r^5 at unit distance is 25") {
    ProjectedStencil proj;
    proj.stencil.center = 0;
    proj.stencil.h_max = 1.0;
    proj.coords = {{0.0, 0.0}, {1.0, 0.0}};
    proj.heights = {0.0, 0.0};
    proj.stencil.indices = {0, 1};
    const double lap = (phs_derivative_row(proj, 2, Deriv::Dxx) +
                        phs_derivative_row(proj, 2, Deriv::Dyy))[1];
    CHECK(lap == doctest::Approx(25.0).epsilon(1e-13));
  }
  SUBCASE("closed forms agree with finite differences") {
    Rng rng(51);
    for (int kappa : {1, 2, 3, 4}) {
      for (int trial = 0; trial < 5; ++trial) {
        Eigen::Vector2d xj(rng.uniform(-2, 2), rng.uniform(-2, 2));
        if (xj.norm() < 0.3) xj *= 2.0;
        ProjectedStencil proj;
        proj.stencil.center = 0;
        proj.stencil.h_max = 1.0;
        proj.coords = {{0.0, 0.0}, xj};
        proj.heights = {0.0, 0.0};
        proj.stencil.indices = {0, 1};
        for (Deriv op : kAllDerivs) {
          const double expected = oracles::phs_fd_derivative(xj, kappa, op);
          const double got = phs_derivative_row(proj, kappa, op)[1];
          CHECK(std::abs(got - expected) <= 2e-5 * std::max(1.0, std::abs(expected)));
        }
      }
    }
  }
  SUBCASE("second derivatives demand kappa >= 1") {
    ProjectedStencil proj;
    proj.stencil.center = 0;
    proj.stencil.h_max = 1.0;
    proj.coords = {{0.0, 0.0}, {1.0, 0.0}};
    proj.heights = {0.0, 0.0};
    proj.stencil.indices = {0, 1};
    CHECK_THROWS_AS(phs_derivative_row(proj, 0, Deriv::Dxx), std::invalid_argument);
    CHECK_NOTHROW(phs_derivative_row(proj, 0, Deriv::Dx));
  }
}

TEST_CASE("derivative weights on the 9-point grid") {
  ProjectedStencil proj = oracles::flat_grid_stencil(1);
  RbffdConfig config{2, 2, 1.5};
  StencilWeights w = rbffd_derivative_weights(proj, config);

  SUBCASE("reproduces the Laplacian of x^2 + y^2") {
    Eigen::VectorXd samples(proj.size());
    for (int j = 0; j < proj.size(); ++j) samples[j] = proj.coords[j].squaredNorm();
    CHECK(std::abs((w.cxx + w.cyy).dot(samples) - 4.0) <= 1e-10);
  }
  SUBCASE("weights reproduce functions from the native PHS+Poly space") {
    // kernel expansions are admissible only under the moment conditions
    // P^T a = 0; project a random coefficient vector onto that constraint
    const int kappa = config.resolved_kappa();
    PolyBasis basis(config.degree, 1.0);
    const Eigen::MatrixXd p = basis.vandermonde(proj.coords);
    Rng rng(55);
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::VectorXd a(proj.size());
      for (int j = 0; j < proj.size(); ++j) a[j] = rng.uniform(-1, 1);
      a -= p * (p.transpose() * p).ldlt().solve(p.transpose() * a);
      REQUIRE((p.transpose() * a).cwiseAbs().maxCoeff() <= 1e-12);
      Eigen::VectorXd b(basis.size());
      for (int k = 0; k < basis.size(); ++k) b[k] = rng.uniform(-1, 1);

      auto native = [&](const Eigen::Vector2d& x) {
        double out = 0.0;
        for (int j = 0; j < proj.size(); ++j)
          out += a[j] * phs_kernel((x - proj.coords[j]).norm(), kappa);
        return out + (basis.vandermonde({x}) * b)(0, 0);
      };
      Eigen::VectorXd samples(proj.size());
      for (int j = 0; j < proj.size(); ++j) samples[j] = native(proj.coords[j]);

      for (Deriv op : kAllDerivs) {
        // analytic derivative of the expansion at the origin
        double expected = basis.derivative_at_origin(op).dot(b);
        ProjectedStencil shifts;
        shifts.stencil.center = 0;
        shifts.stencil.h_max = 1.0;
        shifts.coords = proj.coords;
        shifts.heights.assign(proj.size(), 0.0);
        shifts.stencil.indices = proj.stencil.indices;
        expected += phs_derivative_row(shifts, kappa, op).dot(a);
        const double got = w.weights(op).dot(samples);
        CHECK(std::abs(got - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
      }
    }
  }
}

TEST_CASE("interpolant and moment conditions") {
  const SurfaceModel torus(SurfaceKind::Torus);
  PointCloud cloud = generate_poisson_torus(2038, 19);
  KdTree tree(cloud.points);
  Rng rng(52);
  RbffdConfig config{4, -1, 1.5};

  for (int trial = 0; trial < 10; ++trial) {
    const int node = static_cast<int>(rng.uniform(0, cloud.size()));
    ProjectedStencil proj =
        oracles::projected_on_surface(cloud, torus, tree, node, config.degree, config.tau);
    Eigen::VectorXd values(proj.size());
    for (int j = 0; j < proj.size(); ++j)
      values[j] = std::sin(3.0 * proj.coords[j].x()) + proj.heights[j];

    PhsInterpolant s = rbffd_interpolate(proj, config, values);

    // interpolation conditions
    double worst = 0.0;
    for (int j = 0; j < proj.size(); ++j)
      worst = std::max(worst, std::abs(s.value(proj.coords[j]) - values[j]));
    CHECK(worst <= 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff()));

    // moment conditions P^T a = 0
    PolyBasis basis(config.degree, 1.0);
    Eigen::MatrixXd p = basis.vandermonde(s.scaled_nodes);
    CHECK((p.transpose() * s.kernel_coeffs).cwiseAbs().maxCoeff() <=
          1e-10 * std::max(1.0, s.kernel_coeffs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("polynomial exactness on torus stencils") {
  const SurfaceModel torus(SurfaceKind::Torus);
  PointCloud cloud = generate_poisson_torus(2038, 42);
  KdTree tree(cloud.points);
  Rng rng(53);

  for (int degree : {2, 4, 6}) {
    RbffdConfig config{degree, -1, 1.5};
    const double tolerance = degree == 6 ? 1e-6 : 1e-8;
    for (int trial = 0; trial < 12; ++trial) {
      const int node = static_cast<int>(rng.uniform(0, cloud.size()));
      ProjectedStencil proj =
          oracles::projected_on_surface(cloud, torus, tree, node, degree, config.tau);
      StencilWeights w = rbffd_derivative_weights(proj, config);
      oracles::Poly2 poly = oracles::Poly2::random(degree, rng);
      Eigen::VectorXd samples(proj.size());
      for (int j = 0; j < proj.size(); ++j)
        samples[j] = poly.eval(proj.coords[j].x(), proj.coords[j].y());
      for (Deriv op : kAllDerivs) {
        const double expected = poly.derivative_at_origin(op);
        const double got = w.weights(op).dot(samples);
        CHECK(std::abs(got - expected) <= tolerance * std::max(1.0, std::abs(expected)));
      }
    }
  }
}

TEST_CASE("sdo assembly") {
  ProjectedStencil proj = oracles::flat_grid_stencil(2);
  RbffdConfig config{2, -1, 1.5};
  StencilWeights w = rbffd_derivative_weights(proj, config);

  SUBCASE("Laplacian row is cxx + cyy") {
    SdoRows rows = rbffd_sdo_weights(w, SdoKind::Laplacian);
    CHECK((rows.rows[0] - (w.cxx + w.cyy)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("flat gradient z-component vanishes") {
    SdoRows rows = rbffd_sdo_weights(w, SdoKind::Gradient);
    CHECK(rows.rows[2].cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("frame invariance of assembled rows") {
  const SurfaceModel sphere(SurfaceKind::UnitSphere);
  PointCloud cloud = generate_icosahedral(3);
  KdTree tree(cloud.points);
  Rng rng(54);
  RbffdConfig config{4, -1, 1.5};

  for (int trial = 0; trial < 8; ++trial) {
    const int node = static_cast<int>(rng.uniform(0, cloud.size()));
    const Stencil st =
        select_stencil(tree, cloud.points, node, default_initial_size(4), config.tau);
    TangentFrame frame = exact_frame(sphere, cloud.points[node]);

    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    TangentFrame rotated;
    rotated.xi1 = std::cos(angle) * frame.xi1 + std::sin(angle) * frame.xi2;
    rotated.xi2 = -std::sin(angle) * frame.xi1 + std::cos(angle) * frame.xi2;
    rotated.eta = -frame.eta;

    StencilWeights w1 = rbffd_derivative_weights(project(cloud.points, st, frame), config);
    StencilWeights w2 =
        rbffd_derivative_weights(project(cloud.points, st, rotated), config);

    const Eigen::VectorXd lap1 = rbffd_sdo_weights(w1, SdoKind::Laplacian).rows[0];
    const Eigen::VectorXd lap2 = rbffd_sdo_weights(w2, SdoKind::Laplacian).rows[0];
    CHECK((lap1 - lap2).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(1.0, lap1.lpNorm<1>()));

    const SdoRows g1 = rbffd_sdo_weights(w1, SdoKind::Gradient);
    const SdoRows g2 = rbffd_sdo_weights(w2, SdoKind::Gradient);
    for (int d = 0; d < 3; ++d)
      CHECK((g1.rows[d] - g2.rows[d]).cwiseAbs().maxCoeff() <=
            1e-12 * std::max(1.0, g1.rows[d].lpNorm<1>()));
  }
}

TEST_CASE("config validation") {
  ProjectedStencil proj = oracles::flat_grid_stencil(1);
  CHECK_THROWS_AS(rbffd_derivative_weights(proj, RbffdConfig{2, 0, 1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(rbffd_derivative_weights(proj, RbffdConfig{2, 3, 1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(rbffd_derivative_weights(proj, RbffdConfig{4, -1, 1.5}),
                  StencilSizeError);  // 9 < L = 15
}

TEST_CASE("growing tau does not hurt on the torus") {
  // needs a reasonably resolved cloud; on coarse clouds the larger stencils
  // wrap too far around the tube for the trend to show
  const SurfaceModel torus(SurfaceKind::Torus);
  PointCloud cloud = generate_poisson_torus(8153, 42);
  KdTree tree(cloud.points);
  const TestField field = TestField::torus_polynomial();

  auto laplacian_error = [&](double tau) {
    RbffdConfig config{4, -1, tau};
    double num = 0.0, den = 0.0;
    for (int node = 0; node < cloud.size(); node += 10) {
      ProjectedStencil proj = oracles::projected_on_surface(cloud, torus, tree, node,
                                                            config.degree, tau);
      StencilWeights w = rbffd_derivative_weights(proj, config);
      Eigen::VectorXd samples(proj.size());
      for (int j = 0; j < proj.size(); ++j)
        samples[j] = field.value(cloud.points[proj.stencil.indices[j]]);
      const double approx = rbffd_sdo_weights(w, SdoKind::Laplacian).rows[0].dot(samples);
      const double exact = field.surface_laplacian(cloud.points[node]);
      num += (approx - exact) * (approx - exact);
      den += exact * exact;
    }
    return std::sqrt(num / den);
  };

  const double err_15 = laplacian_error(1.5);
  const double err_20 = laplacian_error(2.0);
  CHECK(err_20 <= 1.05 * err_15);
}

TEST_CASE("single-node smoke check against the exact sphere Laplacian") {
  const SurfaceModel sphere(SurfaceKind::UnitSphere);
  PointCloud cloud = generate_icosahedral(5);
  KdTree tree(cloud.points);
  const TestField field = TestField::sphere_gaussians(42);
  RbffdConfig config{4, -1, 1.5};

  ProjectedStencil proj = oracles::projected_on_surface(cloud, sphere, tree, 1234, 4, 1.5);
  StencilWeights w = rbffd_derivative_weights(proj, config);
  Eigen::VectorXd samples(proj.size());
  for (int j = 0; j < proj.size(); ++j)
    samples[j] = field.value(cloud.points[proj.stencil.indices[j]]);
  const double approx = rbffd_sdo_weights(w, SdoKind::Laplacian).rows[0].dot(samples);
  const double exact = field.surface_laplacian(cloud.points[1234]);
  CHECK(std::abs(approx - exact) <= 1e-3 * std::max(1.0, std::abs(exact)));
}
