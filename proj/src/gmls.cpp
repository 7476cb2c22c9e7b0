#include "surfops/gmls.hpp"

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

struct WlsFactorization {
  Eigen::MatrixXd thin_q;        // n x L
  Eigen::MatrixXd r;             // L x L upper triangular
  Eigen::PermutationMatrix<Eigen::Dynamic> perm;
  Eigen::VectorXd sqrt_w;        // n
  PolyBasis basis;
};

// QR of W^{1/2} P with column pivoting; the pivoted diagonal ratio flags
// rank deficiency instead of silently regularizing.
WlsFactorization factorize(const ProjectedStencil& proj, const GmlsConfig& config) {
  const int n = proj.size();
  const int basis_size = default_initial_size(config.degree);
  if (n <= basis_size) {
    std::ostringstream msg;
    msg << "gmls stencil too small at node " << proj.stencil.center << ": n_i=" << n
        << " <= L=" << basis_size << " (raise tau)";
    throw StencilSizeError(msg.str());
  }
  if (config.kernel_exponent < 1)
    throw std::invalid_argument("gmls kernel exponent m must be >= 1");
  if (!(config.tau >= 1.0)) throw std::invalid_argument("gmls tau must be >= 1");

  const double h = proj.stencil.h_max;
  if (!(h > 0.0)) throw DegenerateGeometryError("stencil has zero radius");
  const double rho = config.tau * h;

  PolyBasis basis(config.degree, h);
  Eigen::MatrixXd p = basis.vandermonde(proj.coords);

  Eigen::VectorXd sqrt_w(n);
  for (int j = 0; j < n; ++j)
    sqrt_w[j] = std::sqrt(weight_kernel(proj.coords[j].norm(), rho, config.kernel_exponent));

  Eigen::MatrixXd b = sqrt_w.asDiagonal() * p;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);

  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(basis_size, basis_size)
                          .triangularView<Eigen::Upper>();
  const double pivot0 = std::abs(r(0, 0));
  for (int k = 0; k < basis_size; ++k) {
    if (!(std::abs(r(k, k)) > 1e-10 * pivot0)) {
      std::ostringstream msg;
      msg << "stencil at node " << proj.stencil.center
          << " is not unisolvent for degree " << config.degree << " (pivot ratio "
          << (pivot0 > 0 ? std::abs(r(k, k)) / pivot0 : 0.0) << ")";
      throw UnisolvencyError(msg.str());
    }
  }

  WlsFactorization f{Eigen::MatrixXd(), std::move(r), qr.colsPermutation(),
                     std::move(sqrt_w), basis};
  f.thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, basis_size);
  return f;
}

// c = W^{1/2} Q R^{-T} Pi^T d reproduces W P (P^T W P)^{-1} d without
// forming normal equations.
Eigen::VectorXd weight_vector(const WlsFactorization& f, Deriv op) {
  Eigen::VectorXd d = f.basis.derivative_at_origin(op);
  Eigen::VectorXd permuted = f.perm.transpose() * d;
  Eigen::VectorXd y =
      f.r.triangularView<Eigen::Upper>().transpose().solve(permuted);
  return f.sqrt_w.asDiagonal() * (f.thin_q * y);
}

}  // namespace

double weight_kernel(double r, double rho, int m) {
  if (!(rho > 0.0)) throw std::invalid_argument("weight kernel support must be positive");
  const double t = 1.0 - r / rho;
  if (t <= 0.0) return 0.0;
  return int_pow(t, 2 * m);
}

StencilWeights gmls_derivative_weights(const ProjectedStencil& proj,
                                       const GmlsConfig& config) {
  const WlsFactorization f = factorize(proj, config);

  StencilWeights w;
  w.frame = proj.frame;
  w.cx = weight_vector(f, Deriv::Dx);
  w.cy = weight_vector(f, Deriv::Dy);
  if (config.degree >= 2) {
    w.cxx = weight_vector(f, Deriv::Dxx);
    w.cxy = weight_vector(f, Deriv::Dxy);
    w.cyy = weight_vector(f, Deriv::Dyy);
  }

  // Monge-fit derivatives reuse the same weights: d_op q(0) = c_op . f
  Eigen::Map<const Eigen::VectorXd> heights(proj.heights.data(), proj.size());
  w.monge.fx = w.cx.dot(heights);
  w.monge.fy = w.cy.dot(heights);
  if (config.degree >= 2) {
    w.monge.fxx = w.cxx.dot(heights);
    w.monge.fxy = w.cxy.dot(heights);
    w.monge.fyy = w.cyy.dot(heights);
  }
  return w;
}

Eigen::Vector2d gmls_monge_gradient(const ProjectedStencil& proj,
                                    const GmlsConfig& config) {
  const WlsFactorization f = factorize(proj, config);
  Eigen::Map<const Eigen::VectorXd> heights(proj.heights.data(), proj.size());
  return {weight_vector(f, Deriv::Dx).dot(heights),
          weight_vector(f, Deriv::Dy).dot(heights)};
}

MetricTerms metric_terms(const MongeDerivs& monge) {
  const double a = monge.fx, b = monge.fy;
  const double p = monge.fxx, q = monge.fxy, r = monge.fyy;

  MetricTerms m;
  m.metric << 1.0 + a * a, a * b, a * b, 1.0 + b * b;
  m.det = 1.0 + a * a + b * b;  // det(G) simplifies exactly
  if (!(m.det > 0.0))
    throw DegenerateGeometryError("metric determinant not positive (NaN input?)");
  m.inverse << (1.0 + b * b) / m.det, -a * b / m.det, -a * b / m.det,
      (1.0 + a * a) / m.det;

  // expanded surface Laplacian: first-order coefficients over |g|^2,
  // second-order coefficients g11, 2 g12, g22
  const double det_sq = m.det * m.det;
  const double cx = (b * q * (1.0 + 2.0 * a * a + b * b) -
                     (a * p + b * q) * (1.0 + b * b) - a * r * (1.0 + a * a)) /
                    det_sq;
  const double cy = (a * q * (1.0 + 2.0 * b * b + a * a) -
                     (b * r + a * q) * (1.0 + a * a) - b * p * (1.0 + b * b)) /
                    det_sq;
  m.laplacian_coeffs = {cx, cy, m.inverse(0, 0), 2.0 * m.inverse(0, 1), m.inverse(1, 1)};
  return m;
}

SdoRows gmls_sdo_weights(const StencilWeights& weights, SdoKind kind) {
  const MetricTerms met = metric_terms(weights.monge);
  SdoRows out;

  if (kind == SdoKind::Laplacian) {
    if (weights.cxx.size() != weights.cx.size())
      throw std::invalid_argument("surface Laplacian requires degree >= 2");
    const auto& c = met.laplacian_coeffs;
    out.rows[0] = c[0] * weights.cx + c[1] * weights.cy + c[2] * weights.cxx +
                  c[3] * weights.cxy + c[4] * weights.cyy;
    out.count = 1;
    return out;
  }

  // Gradient and divergence share the contraction R * (w1, w2, w3): the
  // metric blocks act on the in-plane derivatives and the Monge slope feeds
  // the normal component.
  const Eigen::VectorXd w1 = met.inverse(0, 0) * weights.cx + met.inverse(0, 1) * weights.cy;
  const Eigen::VectorXd w2 = met.inverse(1, 0) * weights.cx + met.inverse(1, 1) * weights.cy;
  const Eigen::VectorXd w3 = weights.monge.fx * w1 + weights.monge.fy * w2;
  const Eigen::Matrix3d r = weights.frame.rotation();
  for (int d = 0; d < 3; ++d)
    out.rows[d] = r(d, 0) * w1 + r(d, 1) * w2 + r(d, 2) * w3;
  out.count = 3;
  return out;
}

}  // namespace surfops
