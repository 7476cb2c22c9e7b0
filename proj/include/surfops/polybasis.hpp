#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace surfops {

enum class Deriv { Dx, Dy, Dxx, Dxy, Dyy };

inline constexpr int kNumDerivs = 5;
inline constexpr Deriv kAllDerivs[kNumDerivs] = {Deriv::Dx, Deriv::Dy, Deriv::Dxx,
                                                 Deriv::Dxy, Deriv::Dyy};

int deriv_order(Deriv op);

// Centered bivariate monomial basis for P^2_l in graded-lex order, with the
// coordinates divided by `scale` before evaluation (Vandermonde conditioning;
// the scale is undone in derivative_at_origin, so weights computed against
// this basis approximate unscaled derivatives).
class PolyBasis {
public:
  explicit PolyBasis(int degree, double scale = 1.0);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  double scale() const { return scale_; }
  const std::vector<std::pair<int, int>>& exponents() const { return exponents_; }

  // P(j,k) = p_k(x_j/scale, y_j/scale); first column is all ones.
  Eigen::MatrixXd vandermonde(const std::vector<Eigen::Vector2d>& pts) const;

  // Derivatives of the basis functions at the origin. Exactly one entry is
  // nonzero for centered monomials: 1/h for first order, 2/h^2 for Dxx and
  // Dyy, 1/h^2 for Dxy.
  Eigen::VectorXd derivative_at_origin(Deriv op) const;

private:
  int degree_;
  double scale_;
  std::vector<std::pair<int, int>> exponents_;
};

}  // namespace surfops
