#include "surfops/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "surfops/errors.hpp"
#include "surfops/gmls.hpp"
#include "surfops/parallel.hpp"
#include "surfops/rbffd.hpp"
#include "surfops/spatial.hpp"

namespace surfops {

namespace {

void validate_params(const OperatorParams& params, const SurfaceModel* surface) {
  if (params.degree < 1) throw std::invalid_argument("degree must be at least 1");
  if (params.kind == SdoKind::Laplacian && params.degree < 2)
    throw std::invalid_argument("surface Laplacian requires degree >= 2");
  if (!(params.tau >= 1.0)) throw std::invalid_argument("tau must be >= 1");
  if (params.tangent == TangentMode::Exact && surface == nullptr)
    throw std::invalid_argument("exact tangent mode requires a surface model");
  if (params.tangent_iters < 0)
    throw std::invalid_argument("tangent_iters must be nonnegative");
  if (params.retry_tau < 0 || params.retry_tau > 3)
    throw std::invalid_argument("retry_tau must be in [0, 3]");
  if (params.method == Method::Rbffd) {
    const int kappa = params.kappa < 0 ? params.degree : params.kappa;
    if (kappa < 1) throw std::invalid_argument("rbffd kappa must be >= 1");
    if (kappa > params.degree)
      throw std::invalid_argument("rbffd kappa must not exceed the degree");
  } else if (params.kernel_exponent < 1) {
    throw std::invalid_argument("gmls kernel exponent m must be >= 1");
  }
}

struct NodeRows {
  std::vector<int> indices;
  SdoRows rows;
};

// stencil -> frame -> projection -> weights -> SDO rows for one node
NodeRows process_node(int i, const PointCloud& cloud, const SurfaceModel* surface,
                      const KdTree& tree, const OperatorParams& params) {
  const int initial = default_initial_size(params.degree);

  double tau = params.tau;
  for (int attempt = 0;; ++attempt) {
    // the kernel support rho = tau * h_max follows the grown tau on retries
    const GmlsConfig gmls_cfg{params.degree, params.kernel_exponent, tau};
    const RbffdConfig rbffd_cfg{params.degree, params.kappa, tau};
    try {
      Stencil stencil = select_stencil(tree, cloud.points, i, initial, tau);

      TangentFrame frame;
      if (params.tangent == TangentMode::Exact) {
        frame = exact_frame(*surface, cloud.points[i]);
      } else {
        frame = pca_frame(cloud.points, stencil, surface);
        MongeGradientFn fit;
        if (params.method == Method::Gmls)
          fit = [&](const ProjectedStencil& p) { return gmls_monge_gradient(p, gmls_cfg); };
        else
          fit = [&](const ProjectedStencil& p) { return rbffd_monge_gradient(p, rbffd_cfg); };
        frame = refine_frame(cloud.points, stencil, frame, fit, params.tangent_iters);
      }

      ProjectedStencil proj = project(cloud.points, stencil, frame);
      NodeRows out;
      if (params.method == Method::Gmls) {
        StencilWeights w = gmls_derivative_weights(proj, gmls_cfg);
        out.rows = gmls_sdo_weights(w, params.kind);
      } else {
        StencilWeights w = rbffd_derivative_weights(proj, rbffd_cfg);
        out.rows = rbffd_sdo_weights(w, params.kind);
      }
      out.indices = std::move(stencil.indices);
      return out;
    } catch (const StencilSizeError&) {
      if (attempt >= params.retry_tau) throw;
      tau *= 1.25;
    } catch (const UnisolvencyError&) {
      if (attempt >= params.retry_tau) throw;
      tau *= 1.25;
    } catch (const DegenerateGeometryError&) {
      // collinear stencils are a stencil-selection problem too
      if (attempt >= params.retry_tau) throw;
      tau *= 1.25;
    }
  }
}

}  // namespace

SurfaceOperator build_operator(const PointCloud& cloud, const SurfaceModel* surface,
                               const OperatorParams& params) {
  const int n = cloud.size();
  if (n == 0) throw std::invalid_argument("cannot build an operator on an empty cloud");
  validate_params(params, surface);

  KdTree tree(cloud.points);

  std::vector<NodeRows> rows(n);
  std::mutex failure_mutex;
  int failed_node = -1;
  std::string failure_reason;

  try {
    parallel_for(n, params.threads, [&](int i) {
      try {
        rows[i] = process_node(i, cloud, surface, tree, params);
      } catch (const std::exception& e) {
        std::scoped_lock lock(failure_mutex);
        if (failed_node < 0 || i < failed_node) {
          failed_node = i;
          failure_reason = e.what();
        }
        throw;
      }
    });
  } catch (...) {
    if (failed_node >= 0) {
      std::ostringstream msg;
      msg << "operator build failed at node " << failed_node << ": " << failure_reason;
      throw std::runtime_error(msg.str());
    }
    throw;
  }

  SurfaceOperator op;
  op.kind = params.kind;
  op.method = params.method;
  op.params = params;
  const int n_mats = params.kind == SdoKind::Laplacian ? 1 : 3;
  op.stencil_sizes.resize(n);

  std::vector<Eigen::Triplet<double>> triplets;
  for (int m = 0; m < n_mats; ++m) {
    triplets.clear();
    for (int i = 0; i < n; ++i) {
      const auto& nr = rows[i];
      op.stencil_sizes[i] = static_cast<int>(nr.indices.size());
      for (size_t k = 0; k < nr.indices.size(); ++k)
        triplets.emplace_back(i, nr.indices[k], nr.rows.rows[m][static_cast<Eigen::Index>(k)]);
    }
    SparseMat mat(n, n);
    mat.setFromTriplets(triplets.begin(), triplets.end());
    mat.makeCompressed();
    op.matrices.push_back(std::move(mat));
  }
  return op;
}

Eigen::VectorXd SurfaceOperator::apply(const Eigen::VectorXd& values) const {
  if (kind != SdoKind::Laplacian)
    throw std::invalid_argument("apply(): operator is not a Laplacian");
  if (values.size() != size()) throw std::invalid_argument("apply(): length mismatch");
  return matrices[0] * values;
}

Eigen::MatrixX3d SurfaceOperator::apply_gradient(const Eigen::VectorXd& values) const {
  if (kind != SdoKind::Gradient)
    throw std::invalid_argument("apply_gradient(): operator is not a gradient");
  if (values.size() != size())
    throw std::invalid_argument("apply_gradient(): length mismatch");
  Eigen::MatrixX3d out(size(), 3);
  for (int d = 0; d < 3; ++d) out.col(d) = matrices[d] * values;
  return out;
}

Eigen::VectorXd SurfaceOperator::apply_divergence(const Eigen::MatrixX3d& values) const {
  if (kind != SdoKind::Divergence)
    throw std::invalid_argument("apply_divergence(): operator is not a divergence");
  if (values.rows() != size())
    throw std::invalid_argument("apply_divergence(): length mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  for (int d = 0; d < 3; ++d) out += matrices[d] * values.col(d);
  return out;
}

// ---------------------------------------------------------------------------
// Operator files: header then one "row col value" triplet per line, values
// with 17 significant digits so the round trip is exact.

namespace {

const char* kind_name(SdoKind kind) {
  switch (kind) {
    case SdoKind::Gradient: return "grad";
    case SdoKind::Divergence: return "div";
    default: return "lap";
  }
}

const char* method_name(Method method) {
  return method == Method::Gmls ? "gmls" : "rbffd";
}

SdoKind parse_kind(const std::string& s) {
  if (s == "grad") return SdoKind::Gradient;
  if (s == "div") return SdoKind::Divergence;
  if (s == "lap") return SdoKind::Laplacian;
  throw ParseError("unknown operator kind: " + s);
}

Method parse_method(const std::string& s) {
  if (s == "gmls") return Method::Gmls;
  if (s == "rbffd") return Method::Rbffd;
  throw ParseError("unknown method: " + s);
}

}  // namespace

void export_operator(const SurfaceOperator& op, const std::string& path) {
  if (op.size() == 0) throw std::invalid_argument("refusing to export an empty operator");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write operator file: " + path);

  char buf[128];
  out << "surfops-operator 1\n";
  out << "kind " << kind_name(op.kind) << "\n";
  out << "method " << method_name(op.method) << "\n";
  out << "n " << op.size() << "\n";
  out << "degree " << op.params.degree << "\n";
  std::snprintf(buf, sizeof(buf), "tau %.17g\n", op.params.tau);
  out << buf;
  if (op.method == Method::Gmls)
    out << "m " << op.params.kernel_exponent << "\n";
  else
    out << "kappa " << (op.params.kappa < 0 ? op.params.degree : op.params.kappa) << "\n";
  out << "tangent " << (op.params.tangent == TangentMode::Exact ? "exact" : "approx")
      << "\n";
  out << "tangent_iters " << op.params.tangent_iters << "\n";
  out << "matrices " << op.matrix_count() << "\n";
  for (int m = 0; m < op.matrix_count(); ++m) {
    const SparseMat& mat = op.matrices[m];
    out << "matrix " << m << " " << mat.nonZeros() << "\n";
    for (int row = 0; row < mat.outerSize(); ++row) {
      for (SparseMat::InnerIterator it(mat, row); it; ++it) {
        std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", static_cast<int>(it.row()),
                      static_cast<int>(it.col()), it.value());
        out << buf;
      }
    }
  }
}

SurfaceOperator import_operator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open operator file: " + path);

  int lineno = 0;
  auto next_line = [&](std::string& line) {
    if (!std::getline(in, line)) throw ParseError(path + ": unexpected end of file");
    ++lineno;
  };
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(path + " line " + std::to_string(lineno) + ": " + what);
  };

  std::string line;
  next_line(line);
  if (line != "surfops-operator 1") throw fail("bad magic");

  SurfaceOperator op;
  int n = 0, n_mats = 0;
  auto read_kv = [&](const std::string& key) -> std::string {
    next_line(line);
    std::istringstream ss(line);
    std::string k, v;
    if (!(ss >> k >> v) || k != key) throw fail("expected '" + key + " <value>'");
    return v;
  };

  try {
    op.kind = parse_kind(read_kv("kind"));
    op.method = parse_method(read_kv("method"));
    n = std::stoi(read_kv("n"));
    if (n <= 0) throw fail("node count must be positive");
    op.params.kind = op.kind;
    op.params.method = op.method;
    op.params.degree = std::stoi(read_kv("degree"));
    op.params.tau = std::stod(read_kv("tau"));
    if (op.method == Method::Gmls)
      op.params.kernel_exponent = std::stoi(read_kv("m"));
    else
      op.params.kappa = std::stoi(read_kv("kappa"));
    const std::string tangent = read_kv("tangent");
    if (tangent != "exact" && tangent != "approx") throw fail("bad tangent mode");
    op.params.tangent = tangent == "exact" ? TangentMode::Exact : TangentMode::Approx;
    op.params.tangent_iters = std::stoi(read_kv("tangent_iters"));
    n_mats = std::stoi(read_kv("matrices"));
  } catch (const std::invalid_argument&) {
    throw fail("malformed number");
  } catch (const std::out_of_range&) {
    throw fail("number out of range");
  }
  const int expected = op.kind == SdoKind::Laplacian ? 1 : 3;
  if (n_mats != expected) throw fail("matrix count does not match operator kind");

  for (int m = 0; m < n_mats; ++m) {
    next_line(line);
    std::istringstream header(line);
    std::string tag;
    int index = -1;
    long long nnz = -1;
    if (!(header >> tag >> index >> nnz) || tag != "matrix" || index != m || nnz < 0)
      throw fail("expected 'matrix " + std::to_string(m) + " <nnz>'");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
      next_line(line);
      std::istringstream ss(line);
      int row, col;
      double value;
      if (!(ss >> row >> col >> value)) throw fail("expected 'row col value'");
      if (row < 0 || row >= n || col < 0 || col >= n) throw fail("index out of range");
      triplets.emplace_back(row, col, value);
    }
    SparseMat mat(n, n);
    mat.setFromTriplets(triplets.begin(), triplets.end());
    mat.makeCompressed();
    op.matrices.push_back(std::move(mat));
  }

  op.stencil_sizes.assign(n, 0);
  for (int row = 0; row < n; ++row)
    op.stencil_sizes[row] =
        static_cast<int>(op.matrices[0].outerIndexPtr()[row + 1] -
                         op.matrices[0].outerIndexPtr()[row]);
  return op;
}

// ---------------------------------------------------------------------------
// Value files

Eigen::VectorXd load_scalar_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open value file: " + path);
  std::vector<double> vals;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double v;
    if (!(ss >> v)) continue;
    std::string rest;
    if (ss >> rest)
      throw ParseError(path + " line " + std::to_string(lineno) + ": expected one value");
    vals.push_back(v);
  }
  if (vals.empty()) return Eigen::VectorXd();
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Eigen::MatrixX3d load_vector_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open value file: " + path);
  std::vector<Eigen::Vector3d> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x)) continue;
    if (!(ss >> y >> z))
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": expected three values");
    rows.emplace_back(x, y, z);
  }
  Eigen::MatrixX3d out(static_cast<Eigen::Index>(rows.size()), 3);
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i];
  return out;
}

void save_scalar_values(const Eigen::VectorXd& values, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write value file: " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", values[i]);
    out << buf;
  }
}

void save_vector_values(const Eigen::MatrixX3d& values, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write value file: " + path);
  char buf[128];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", values(i, 0), values(i, 1),
                  values(i, 2));
    out << buf;
  }
}

}  // namespace surfops
