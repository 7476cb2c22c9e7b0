#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "surfops/harness.hpp"

using namespace surfops;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("relative errors") {
  Eigen::VectorXd e(2), a(2);
  e << 1.0, 0.0;
  a << 1.0, 0.1;
  ErrorPair r = relative_errors(a, e);
  CHECK(r.two_norm == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(r.max_norm == doctest::Approx(0.1).epsilon(1e-14));

  CHECK(relative_errors(e, e).two_norm == 0.0);
  ErrorPair doubled = relative_errors(Eigen::VectorXd(2.0 * e), e);
  CHECK(doubled.two_norm == doctest::Approx(1.0));
  CHECK(doubled.max_norm == doctest::Approx(1.0));

  CHECK_THROWS_AS(relative_errors(a, Eigen::VectorXd::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(relative_errors(a, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("order fitting") {
  SUBCASE("exact geometric decay gives the exact order") {
    const double beta = fit_order({100, 400, 1600}, {1e-2, 2.5e-3, 6.25e-4});
    CHECK(beta == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("constant errors give order zero") {
    CHECK(fit_order({100, 400, 1600}, {1e-3, 1e-3, 1e-3}) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("only the last three levels count") {
    const double beta =
        fit_order({25, 100, 400, 1600}, {123.0, 1e-2, 2.5e-3, 6.25e-4});
    CHECK(beta == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("reference error sequence lands near 3.1") {
    const double beta = fit_order({8153, 32615, 130463, 521855},
                                  {1.3311e-4, 1.5321e-5, 1.8811e-6, 2.0177e-7});
    CHECK(beta == doctest::Approx(3.1232949).epsilon(1e-6));
    CHECK(std::abs(beta - 3.1) <= 0.1);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(fit_order({100, 400}, {1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(fit_order({100, 400, 1600}, {1.0, -0.5, 0.1}), std::invalid_argument);
  }
}

TEST_CASE("cost model") {
  SUBCASE("single-stencil substitutions") {
    CHECK(cost_model(Method::Gmls, {30}, 15).setup_flops == doctest::Approx(13500.0));
    CHECK(cost_model(Method::Rbffd, {30}, 15).setup_flops == doctest::Approx(60750.0));
    CHECK(cost_model(Method::Gmls, {30}, 15).eval_flops == doctest::Approx(60.0));
    CHECK(cost_model(Method::Rbffd, {30}, 15).eval_flops == doctest::Approx(60.0));
  }
  SUBCASE("uniform stencils give the (1+gamma)^3/(3 gamma) ratio exactly") {
    const int basis_size = 15;
    for (double gamma : {1.5, 2.0, 3.0}) {
      const int n = static_cast<int>(gamma * basis_size);
      std::vector<int> sizes(200, n);
      const double g = static_cast<double>(n) / basis_size;
      const double ratio = cost_model(Method::Rbffd, sizes, basis_size).setup_flops /
                           cost_model(Method::Gmls, sizes, basis_size).setup_flops;
      CHECK(ratio == doctest::Approx((1 + g) * (1 + g) * (1 + g) / (3 * g)).epsilon(1e-12));
    }
  }
  SUBCASE("totals equal a brute-force per-stencil sum") {
    Rng rng(61);
    std::vector<int> sizes;
    for (int i = 0; i < 500; ++i) sizes.push_back(10 + static_cast<int>(rng.uniform(0, 50)));
    const int basis_size = 15;
    double setup_gmls = 0, setup_rbffd = 0, eval = 0;
    for (int n : sizes) {
      setup_gmls += 2.0 * n * basis_size * basis_size;
      const double s = n + basis_size;
      setup_rbffd += (2.0 / 3.0) * s * s * s;
      eval += 2.0 * n;
    }
    CHECK(cost_model(Method::Gmls, sizes, basis_size).setup_flops ==
          doctest::Approx(setup_gmls).epsilon(1e-14));
    CHECK(cost_model(Method::Rbffd, sizes, basis_size).setup_flops ==
          doctest::Approx(setup_rbffd).epsilon(1e-14));
    CHECK(cost_model(Method::Gmls, sizes, basis_size).eval_flops ==
          doctest::Approx(eval).epsilon(1e-14));
  }
}

TEST_CASE("node factories") {
  CHECK(default_level_sizes(NodeFamily::Icosahedral, false) ==
        std::vector<int>{2562, 10242, 40962, 163842});
  CHECK(default_level_sizes(NodeFamily::Hammersley, true) ==
        std::vector<int>{8153, 32615, 130463, 521855});
  CHECK_THROWS_AS(make_nodes(SurfaceKind::Torus, NodeFamily::Icosahedral, 2562, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_nodes(SurfaceKind::UnitSphere, NodeFamily::PoissonDisk, 100, 1),
                  std::invalid_argument);
  CHECK(make_nodes(SurfaceKind::UnitSphere, NodeFamily::Icosahedral, 642, 1).size() == 642);
}

TEST_CASE("tiny convergence run: schema and determinism") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "surfops_harness_test";
  fs::create_directories(dir);

  HarnessOptions opts;
  opts.seed = 42;
  opts.threads = 2;
  opts.timing = false;

  const std::vector<int> sizes = {162, 642, 2562};
  ConvergenceReport report =
      run_convergence(SurfaceKind::UnitSphere, NodeFamily::Icosahedral, Method::Rbffd,
                      SdoKind::Laplacian, 2, 1.5, TangentMode::Exact, sizes, opts);

  REQUIRE(report.levels.size() == 3);
  CHECK(report.levels[2].n_nodes == 2562);
  CHECK(std::isfinite(report.beta_l2));
  // second-order operator at degree 2: order near 1, generously banded
  CHECK(report.beta_l2 > 0.0);

  const std::string path1 = (dir / "conv1.csv").string();
  write_convergence_csv(report, path1);
  std::istringstream csv(slurp(path1));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "level,N,err_l2,err_max,setup_flops,eval_flops,wall_ms,beta_l2,beta_max");

  ConvergenceReport again =
      run_convergence(SurfaceKind::UnitSphere, NodeFamily::Icosahedral, Method::Rbffd,
                      SdoKind::Laplacian, 2, 1.5, TangentMode::Exact, sizes, opts);
  const std::string path2 = (dir / "conv2.csv").string();
  write_convergence_csv(again, path2);
  CHECK(slurp(path1) == slurp(path2));
}

TEST_CASE("tau study and tangent study agree on shared configurations") {
  // same seed means the same node realization, so the tau = 1.5 rows must
  // reproduce the approximate-tangent study values exactly
  HarnessOptions opts;
  opts.seed = 42;
  opts.threads = 2;
  opts.timing = false;

  TauStudyReport taus = run_tau_study(8153, 4, {1.5}, opts);
  TangentStudyReport tangent = run_tangent_study(4, {8153}, opts);
  for (Method method : {Method::Gmls, Method::Rbffd}) {
    double approx_err = -1.0;
    for (const auto& row : tangent.rows)
      if (row.method == method) approx_err = row.err_approx_l2;
    CHECK(taus.error_for(method, 1.5) == approx_err);
  }
}

TEST_CASE("loglog svg plot") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "surfops_harness_test";
  fs::create_directories(dir);
  const std::string path = (dir / "plot.svg").string();
  PlotSeries s1{"rbffd l=2", {1e3, 4e3, 1.6e4}, {1e-2, 2.5e-3, 6.2e-4}};
  PlotSeries s2{"gmls l=2", {1e3, 4e3, 1.6e4}, {2e-2, 5e-3, 1.3e-3}};
  write_loglog_svg({s1, s2}, "N", "relative error", {-1.0, -2.0}, path);
  const std::string svg = slurp(path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("rbffd l=2") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}
