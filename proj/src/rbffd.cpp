#include "surfops/rbffd.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "surfops/errors.hpp"

namespace surfops {

namespace {

double int_pow(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// d_op phi(|x - xj|) at x = 0 for phi(r) = r^{2k+1}. The center entry takes
// the symmetric limit 0 (valid for kappa >= 1; first derivatives at kappa=0
// use the same convention).
double phs_deriv_at_origin(const Eigen::Vector2d& xj, int kappa, Deriv op) {
  if (kappa < 0) throw std::invalid_argument("phs kappa must be nonnegative");
  if (kappa == 0 && deriv_order(op) == 2)
    throw std::invalid_argument("second derivatives of r^1 are singular; use kappa >= 1");

  const double r2 = xj.squaredNorm();
  if (r2 == 0.0) return 0.0;
  const double r = std::sqrt(r2);
  const double k1 = 2.0 * kappa + 1.0;
  const double k3 = 2.0 * kappa - 1.0;
  const double rk = kappa == 0 ? 1.0 / r : int_pow(r, 2 * kappa - 1);  // r^{2k-1}

  switch (op) {
    case Deriv::Dx:  return -k1 * rk * xj.x();
    case Deriv::Dy:  return -k1 * rk * xj.y();
    case Deriv::Dxx: return k1 * rk * (1.0 + k3 * xj.x() * xj.x() / r2);
    case Deriv::Dyy: return k1 * rk * (1.0 + k3 * xj.y() * xj.y() / r2);
    default:         return k1 * k3 * rk * xj.x() * xj.y() / r2;  // Dxy
  }
}

struct SaddleSystem {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd matrix;
  std::vector<Eigen::Vector2d> scaled;
  PolyBasis basis{0};  // reassigned to (degree, scale 1) over the scaled coordinates
  double h = 1.0;
  int n = 0;

  // one step of iterative refinement recovers the digits partial pivoting
  // loses on the higher-order kernels
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd sol = lu.solve(rhs);
    sol += lu.solve(rhs - matrix * sol);
    return sol;
  }
};

SaddleSystem build_saddle(const ProjectedStencil& proj, const RbffdConfig& config) {
  const int n = proj.size();
  const int basis_size = default_initial_size(config.degree);
  const int kappa = config.resolved_kappa();
  if (kappa < 0) throw std::invalid_argument("rbffd kappa must be nonnegative");
  if (kappa > config.degree)
    throw std::invalid_argument("rbffd kappa must not exceed the polynomial degree");
  if (n < basis_size) {
    std::ostringstream msg;
    msg << "rbffd stencil too small at node " << proj.stencil.center << ": n_i=" << n
        << " < L=" << basis_size << " (raise tau)";
    throw StencilSizeError(msg.str());
  }
  if (!(config.tau >= 1.0)) throw std::invalid_argument("rbffd tau must be >= 1");

  const double h = config.tau * proj.stencil.h_max;
  if (!(h > 0.0)) throw DegenerateGeometryError("stencil has zero radius");

  SaddleSystem sys;
  sys.basis = PolyBasis(config.degree, 1.0);
  sys.h = h;
  sys.n = n;
  sys.scaled.reserve(n);
  for (const auto& c : proj.coords) sys.scaled.push_back(c / h);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + basis_size, n + basis_size);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double v = phs_kernel((sys.scaled[j] - sys.scaled[k]).norm(), kappa);
      m(j, k) = v;
      m(k, j) = v;
    }
  }
  const Eigen::MatrixXd p = sys.basis.vandermonde(sys.scaled);
  m.topRightCorner(n, basis_size) = p;
  m.bottomLeftCorner(basis_size, n) = p.transpose();

  sys.matrix = std::move(m);
  sys.lu.compute(sys.matrix);
  const Eigen::VectorXd diag = sys.lu.matrixLU().diagonal().cwiseAbs();
  const double dmax = diag.maxCoeff();
  if (!(diag.minCoeff() > 1e-14 * dmax)) {
    std::ostringstream msg;
    msg << "singular saddle system at node " << proj.stencil.center
        << " (stencil not unisolvent for degree " << config.degree << ")";
    throw UnisolvencyError(msg.str());
  }
  return sys;
}

// Solution of the saddle system for one derivative functional; the top n
// entries are the stencil weights in scaled coordinates.
Eigen::VectorXd saddle_weights(const SaddleSystem& sys, int kappa, Deriv op) {
  const int basis_size = sys.basis.size();
  Eigen::VectorXd rhs(sys.n + basis_size);
  for (int j = 0; j < sys.n; ++j)
    rhs[j] = phs_deriv_at_origin(sys.scaled[j], kappa, op);
  rhs.tail(basis_size) = sys.basis.derivative_at_origin(op);
  const Eigen::VectorXd sol = sys.solve(rhs);
  const double rescale = 1.0 / int_pow(sys.h, deriv_order(op));
  return rescale * sol.head(sys.n);
}

}  // namespace

double phs_kernel(double r, int kappa) {
  if (r < 0.0) throw std::invalid_argument("phs kernel: negative radius");
  if (kappa < 0) throw std::invalid_argument("phs kappa must be nonnegative");
  return int_pow(r, 2 * kappa + 1);
}

Eigen::VectorXd phs_derivative_row(const ProjectedStencil& proj, int kappa, Deriv op) {
  Eigen::VectorXd row(proj.size());
  for (int j = 0; j < proj.size(); ++j)
    row[j] = phs_deriv_at_origin(proj.coords[j], kappa, op);
  return row;
}

double PhsInterpolant::value(const Eigen::Vector2d& xy) const {
  const Eigen::Vector2d q = xy / scale;
  double out = 0.0;
  for (size_t j = 0; j < scaled_nodes.size(); ++j)
    out += kernel_coeffs[static_cast<Eigen::Index>(j)] *
           phs_kernel((q - scaled_nodes[j]).norm(), kappa);
  PolyBasis basis(degree, 1.0);
  const Eigen::MatrixXd p = basis.vandermonde({q});
  out += (p * poly_coeffs)(0, 0);
  return out;
}

Eigen::Vector2d PhsInterpolant::gradient_at_origin() const {
  PolyBasis basis(degree, 1.0);
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int comp = 0; comp < 2; ++comp) {
    const Deriv op = comp == 0 ? Deriv::Dx : Deriv::Dy;
    double acc = 0.0;
    for (size_t j = 0; j < scaled_nodes.size(); ++j)
      acc += kernel_coeffs[static_cast<Eigen::Index>(j)] *
             phs_deriv_at_origin(scaled_nodes[j], kappa, op);
    acc += basis.derivative_at_origin(op).dot(poly_coeffs);
    g[comp] = acc / scale;
  }
  return g;
}

PhsInterpolant rbffd_interpolate(const ProjectedStencil& proj, const RbffdConfig& config,
                                 const Eigen::VectorXd& values) {
  if (values.size() != proj.size())
    throw std::invalid_argument("interpolation data length mismatch");
  const SaddleSystem sys = build_saddle(proj, config);
  const int basis_size = sys.basis.size();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.n + basis_size);
  rhs.head(sys.n) = values;
  const Eigen::VectorXd sol = sys.solve(rhs);

  PhsInterpolant s;
  s.kernel_coeffs = sol.head(sys.n);
  s.poly_coeffs = sol.tail(basis_size);
  s.scaled_nodes = sys.scaled;
  s.scale = sys.h;
  s.degree = config.degree;
  s.kappa = config.resolved_kappa();
  return s;
}

StencilWeights rbffd_derivative_weights(const ProjectedStencil& proj,
                                        const RbffdConfig& config) {
  if (config.resolved_kappa() < 1)
    throw std::invalid_argument("rbffd kappa must be >= 1 for second derivatives");
  const SaddleSystem sys = build_saddle(proj, config);
  const int kappa = config.resolved_kappa();

  StencilWeights w;
  w.frame = proj.frame;
  w.cx = saddle_weights(sys, kappa, Deriv::Dx);
  w.cy = saddle_weights(sys, kappa, Deriv::Dy);
  w.cxx = saddle_weights(sys, kappa, Deriv::Dxx);
  w.cxy = saddle_weights(sys, kappa, Deriv::Dxy);
  w.cyy = saddle_weights(sys, kappa, Deriv::Dyy);

  // saddle matrix is symmetric, so d_op s(0) = c_op . f for the height fit
  Eigen::Map<const Eigen::VectorXd> heights(proj.heights.data(), proj.size());
  w.monge.fx = w.cx.dot(heights);
  w.monge.fy = w.cy.dot(heights);
  w.monge.fxx = w.cxx.dot(heights);
  w.monge.fxy = w.cxy.dot(heights);
  w.monge.fyy = w.cyy.dot(heights);
  return w;
}

Eigen::Vector2d rbffd_monge_gradient(const ProjectedStencil& proj,
                                     const RbffdConfig& config) {
  const SaddleSystem sys = build_saddle(proj, config);
  const int kappa = config.resolved_kappa();
  Eigen::Map<const Eigen::VectorXd> heights(proj.heights.data(), proj.size());
  return {saddle_weights(sys, kappa, Deriv::Dx).dot(heights),
          saddle_weights(sys, kappa, Deriv::Dy).dot(heights)};
}

SdoRows rbffd_sdo_weights(const StencilWeights& weights, SdoKind kind) {
  SdoRows out;
  if (kind == SdoKind::Laplacian) {
    out.rows[0] = weights.cxx + weights.cyy;
    out.count = 1;
    return out;
  }
  const Eigen::Matrix3d r = weights.frame.rotation();
  for (int d = 0; d < 3; ++d)
    out.rows[d] = r(d, 0) * weights.cx + r(d, 1) * weights.cy;
  out.count = 3;
  return out;
}

}  // namespace surfops
