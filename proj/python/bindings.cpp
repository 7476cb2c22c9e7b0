// Python bindings for the main operations: node generation, operator
// assembly and application, test fields, and the error/cost utilities.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <string>

#include "surfops/harness.hpp"
#include "surfops/operators.hpp"

namespace py = pybind11;
using namespace surfops;

namespace {

SurfaceKind surface_from(const std::string& s) {
  if (s == "sphere") return SurfaceKind::UnitSphere;
  if (s == "torus") return SurfaceKind::Torus;
  throw std::invalid_argument("surface must be 'sphere' or 'torus'");
}

NodeFamily family_from(const std::string& s) {
  if (s == "icosahedral") return NodeFamily::Icosahedral;
  if (s == "hammersley") return NodeFamily::Hammersley;
  if (s == "poisson") return NodeFamily::PoissonDisk;
  throw std::invalid_argument("family must be 'icosahedral', 'hammersley' or 'poisson'");
}

Method method_from(const std::string& s) {
  if (s == "gmls") return Method::Gmls;
  if (s == "rbffd") return Method::Rbffd;
  throw std::invalid_argument("method must be 'gmls' or 'rbffd'");
}

SdoKind op_from(const std::string& s) {
  if (s == "grad") return SdoKind::Gradient;
  if (s == "div") return SdoKind::Divergence;
  if (s == "lap") return SdoKind::Laplacian;
  throw std::invalid_argument("op must be 'grad', 'div' or 'lap'");
}

std::string op_name(SdoKind k) {
  switch (k) {
    case SdoKind::Gradient: return "grad";
    case SdoKind::Divergence: return "div";
    default: return "lap";
  }
}

Eigen::MatrixX3d cloud_to_matrix(const PointCloud& cloud) {
  Eigen::MatrixX3d out(cloud.size(), 3);
  for (int i = 0; i < cloud.size(); ++i) out.row(i) = cloud.points[i].transpose();
  return out;
}

PointCloud matrix_to_cloud(const Eigen::MatrixX3d& pts) {
  PointCloud cloud;
  cloud.points.reserve(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    cloud.points.emplace_back(pts(i, 0), pts(i, 1), pts(i, 2));
  return cloud;
}

TestField field_for(SurfaceKind surface, std::uint64_t seed) {
  return make_field(surface, seed);
}

}  // namespace

PYBIND11_MODULE(_surfops, m) {
  m.doc() = "meshfree surface differential operators (GMLS and PHS+Poly RBF-FD)";

  m.def(
      "gen_nodes",
      [](const std::string& surface, const std::string& family, int n,
         std::uint64_t seed) {
        return cloud_to_matrix(make_nodes(surface_from(surface), family_from(family), n, seed));
      },
      py::arg("surface"), py::arg("family"), py::arg("n"), py::arg("seed") = 42,
      "Generate a node set on the sphere or torus; returns an (N, 3) array.");

  m.def(
      "load_nodes",
      [](const std::string& path) { return cloud_to_matrix(load_nodes(path)); },
      py::arg("path"));
  m.def(
      "save_nodes",
      [](const Eigen::MatrixX3d& pts, const std::string& path) {
        save_nodes(matrix_to_cloud(pts), path);
      },
      py::arg("points"), py::arg("path"));

  py::class_<SurfaceOperator, std::shared_ptr<SurfaceOperator>>(m, "Operator")
      .def_property_readonly("n", &SurfaceOperator::size)
      .def_property_readonly("kind", [](const SurfaceOperator& op) { return op_name(op.kind); })
      .def_property_readonly(
          "method",
          [](const SurfaceOperator& op) {
            return std::string(op.method == Method::Gmls ? "gmls" : "rbffd");
          })
      .def_property_readonly("degree",
                             [](const SurfaceOperator& op) { return op.params.degree; })
      .def_property_readonly("stencil_sizes",
                             [](const SurfaceOperator& op) { return op.stencil_sizes; })
      .def(
          "apply",
          [](const SurfaceOperator& op, const Eigen::VectorXd& values) {
            return op.apply(values);
          },
          py::arg("values"), "Apply a Laplacian operator to an N-vector.")
      .def(
          "apply_gradient",
          [](const SurfaceOperator& op, const Eigen::VectorXd& values) {
            return op.apply_gradient(values);
          },
          py::arg("values"), "Apply a gradient operator; returns an (N, 3) array.")
      .def(
          "apply_divergence",
          [](const SurfaceOperator& op, const Eigen::MatrixX3d& values) {
            return op.apply_divergence(values);
          },
          py::arg("values"), "Apply a divergence operator to an (N, 3) field.")
      .def(
          "triplets",
          [](const SurfaceOperator& op, int which) {
            if (which < 0 || which >= op.matrix_count())
              throw std::invalid_argument("matrix index out of range");
            const SparseMat& mat = op.matrices[which];
            std::vector<int> rows, cols;
            std::vector<double> vals;
            rows.reserve(mat.nonZeros());
            cols.reserve(mat.nonZeros());
            vals.reserve(mat.nonZeros());
            for (int r = 0; r < mat.outerSize(); ++r)
              for (SparseMat::InnerIterator it(mat, r); it; ++it) {
                rows.push_back(static_cast<int>(it.row()));
                cols.push_back(static_cast<int>(it.col()));
                vals.push_back(it.value());
              }
            return py::make_tuple(rows, cols, vals);
          },
          py::arg("which") = 0,
          "COO triplets (rows, cols, values) of one component matrix.")
      .def_property_readonly("matrix_count", &SurfaceOperator::matrix_count)
      .def("save", [](const SurfaceOperator& op,
                      const std::string& path) { export_operator(op, path); })
      .def_static("load", [](const std::string& path) {
        return std::make_shared<SurfaceOperator>(import_operator(path));
      });

  m.def(
      "build_operator",
      [](const Eigen::MatrixX3d& points, const py::object& surface,
         const std::string& method, const std::string& op, int degree, double tau,
         int kappa, int kernel_exponent, const std::string& tangent, int tangent_iters,
         int retry_tau, int threads) {
        PointCloud cloud = matrix_to_cloud(points);
        OperatorParams params;
        params.method = method_from(method);
        params.kind = op_from(op);
        params.degree = degree;
        params.tau = tau;
        params.kappa = kappa;
        params.kernel_exponent = kernel_exponent;
        params.tangent = tangent == "exact" ? TangentMode::Exact : TangentMode::Approx;
        params.tangent_iters = tangent_iters;
        params.retry_tau = retry_tau;
        params.threads = threads;
        std::unique_ptr<SurfaceModel> model;
        if (!surface.is_none())
          model = std::make_unique<SurfaceModel>(surface_from(surface.cast<std::string>()));
        return std::make_shared<SurfaceOperator>(
            build_operator(cloud, model.get(), params));
      },
      py::arg("points"), py::arg("surface") = py::none(), py::arg("method") = "rbffd",
      py::arg("op") = "lap", py::arg("degree") = 4, py::arg("tau") = 1.5,
      py::arg("kappa") = -1, py::arg("m") = 2, py::arg("tangent") = "exact",
      py::arg("tangent_iters") = 1, py::arg("retry_tau") = 0, py::arg("threads") = 1,
      "Assemble a sparse surface differential operator over a point cloud.");

  m.def(
      "field_values",
      [](const std::string& surface, const Eigen::MatrixX3d& points, std::uint64_t seed) {
        return sample_values(field_for(surface_from(surface), seed),
                             matrix_to_cloud(points));
      },
      py::arg("surface"), py::arg("points"), py::arg("seed") = 42);
  m.def(
      "field_gradient",
      [](const std::string& surface, const Eigen::MatrixX3d& points, std::uint64_t seed) {
        return sample_surface_gradient(field_for(surface_from(surface), seed),
                                       matrix_to_cloud(points));
      },
      py::arg("surface"), py::arg("points"), py::arg("seed") = 42);
  m.def(
      "field_laplacian",
      [](const std::string& surface, const Eigen::MatrixX3d& points, std::uint64_t seed) {
        return sample_laplacian(field_for(surface_from(surface), seed),
                                matrix_to_cloud(points));
      },
      py::arg("surface"), py::arg("points"), py::arg("seed") = 42);

  m.def(
      "relative_errors",
      [](const Eigen::MatrixXd& approx, const Eigen::MatrixXd& exact) {
        Eigen::Map<const Eigen::VectorXd> a(approx.data(), approx.size());
        Eigen::Map<const Eigen::VectorXd> e(exact.data(), exact.size());
        const ErrorPair r = relative_errors(Eigen::VectorXd(a), Eigen::VectorXd(e));
        return py::make_tuple(r.two_norm, r.max_norm);
      },
      py::arg("approx"), py::arg("exact"),
      "Relative (two-norm, max-norm) errors; vector fields are flattened.");

  m.def(
      "fit_order",
      [](const std::vector<double>& ns, const std::vector<double>& errors) {
        return fit_order(ns, errors);
      },
      py::arg("ns"), py::arg("errors"),
      "Slope of log(err) against log(N^-1/2) over the last three levels.");

  m.def(
      "cost_model",
      [](const std::string& method, const std::vector<int>& stencil_sizes,
         int basis_size) {
        const CostEstimate c = cost_model(method_from(method), stencil_sizes, basis_size);
        return py::make_tuple(c.setup_flops, c.eval_flops);
      },
      py::arg("method"), py::arg("stencil_sizes"), py::arg("basis_size"));

  m.def("basis_size", &default_initial_size, py::arg("degree"),
        "Dimension of the bivariate polynomial space, (l+1)(l+2)/2.");
}
