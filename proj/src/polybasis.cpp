#include "surfops/polybasis.hpp"

#include <stdexcept>

namespace surfops {

int deriv_order(Deriv op) {
  switch (op) {
    case Deriv::Dx:
    case Deriv::Dy:
      return 1;
    default:
      return 2;
  }
}

PolyBasis::PolyBasis(int degree, double scale) : degree_(degree), scale_(scale) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
  if (degree > 10) throw std::invalid_argument("polynomial degree above 10 not supported");
  if (!(scale > 0.0)) throw std::invalid_argument("basis scale must be positive");
  exponents_.reserve((degree + 1) * (degree + 2) / 2);
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) exponents_.emplace_back(a, d - a);
}

Eigen::MatrixXd PolyBasis::vandermonde(const std::vector<Eigen::Vector2d>& pts) const {
  const int n = static_cast<int>(pts.size());
  const int cols = size();
  Eigen::MatrixXd p(n, cols);
  std::vector<double> px(degree_ + 1), py(degree_ + 1);
  for (int j = 0; j < n; ++j) {
    const double sx = pts[j].x() / scale_;
    const double sy = pts[j].y() / scale_;
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= degree_; ++d) {
      px[d] = px[d - 1] * sx;
      py[d] = py[d - 1] * sy;
    }
    for (int k = 0; k < cols; ++k)
      p(j, k) = px[exponents_[k].first] * py[exponents_[k].second];
  }
  return p;
}

Eigen::VectorXd PolyBasis::derivative_at_origin(Deriv op) const {
  if (degree_ < deriv_order(op))
    throw std::invalid_argument("basis degree too low for requested derivative");
  int ax = 0, ay = 0;
  double value = 0.0;
  switch (op) {
    case Deriv::Dx:  ax = 1; ay = 0; value = 1.0 / scale_; break;
    case Deriv::Dy:  ax = 0; ay = 1; value = 1.0 / scale_; break;
    case Deriv::Dxx: ax = 2; ay = 0; value = 2.0 / (scale_ * scale_); break;
    case Deriv::Dxy: ax = 1; ay = 1; value = 1.0 / (scale_ * scale_); break;
    case Deriv::Dyy: ax = 0; ay = 2; value = 2.0 / (scale_ * scale_); break;
  }
  Eigen::VectorXd d = Eigen::VectorXd::Zero(size());
  for (int k = 0; k < size(); ++k) {
    if (exponents_[k].first == ax && exponents_[k].second == ay) {
      d[k] = value;
      break;
    }
  }
  return d;
}

}  // namespace surfops
