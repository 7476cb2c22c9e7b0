#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "surfops/geometry.hpp"
#include "surfops/weights.hpp"

namespace surfops {

enum class Method { Gmls, Rbffd };
enum class TangentMode { Exact, Approx };

struct OperatorParams {
  Method method = Method::Rbffd;
  SdoKind kind = SdoKind::Laplacian;
  int degree = 4;
  double tau = 1.5;
  int kernel_exponent = 2;  // GMLS weight-kernel exponent m
  int kappa = -1;           // RBF-FD PHS exponent; -1 means degree
  TangentMode tangent = TangentMode::Exact;
  int tangent_iters = 1;    // refinement passes in Approx mode
  int retry_tau = 0;        // per-stencil retries with tau*1.25 on failure
  int threads = 1;
};

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Sparse global SDO. Laplacian holds one N x N matrix; gradient three
// (Cartesian output components); divergence three (Cartesian input
// components, summed on apply). Row i is supported exactly on stencil i.
class SurfaceOperator {
public:
  SdoKind kind = SdoKind::Laplacian;
  Method method = Method::Rbffd;
  OperatorParams params;
  std::vector<SparseMat> matrices;
  std::vector<int> stencil_sizes;  // n_i per node

  int size() const { return matrices.empty() ? 0 : static_cast<int>(matrices[0].rows()); }
  int matrix_count() const { return static_cast<int>(matrices.size()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& values) const;             // Laplacian
  Eigen::MatrixX3d apply_gradient(const Eigen::VectorXd& values) const;   // Gradient
  Eigen::VectorXd apply_divergence(const Eigen::MatrixX3d& values) const; // Divergence
};

// Runs the stencil -> frame -> projection -> weights pipeline over every
// node (parallel map, deterministic output) and assembles the sparse
// matrices. `surface` may be null only in Approx tangent mode (synthetic
// clouds); Exact mode reads frames from it. Any per-stencil failure aborts
// the build with the node index and reason.
SurfaceOperator build_operator(const PointCloud& cloud, const SurfaceModel* surface,
                               const OperatorParams& params);

// Triplet text format, full-precision values; export->import->export is
// byte-identical.
void export_operator(const SurfaceOperator& op, const std::string& path);
SurfaceOperator import_operator(const std::string& path);

// Scalar/vector value files for the CLI (one scalar or one "x y z" row per
// line, '#' comments).
Eigen::VectorXd load_scalar_values(const std::string& path);
Eigen::MatrixX3d load_vector_values(const std::string& path);
void save_scalar_values(const Eigen::VectorXd& values, const std::string& path);
void save_vector_values(const Eigen::MatrixX3d& values, const std::string& path);

}  // namespace surfops
