#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace surfops {

using Vec3 = Eigen::Vector3d;

enum class SurfaceKind { UnitSphere, Torus };

// Torus parameters are fixed: center-circle radius 1, tube radius 1/3.
inline constexpr double kTorusCenterRadius = 1.0;
inline constexpr double kTorusTubeRadius = 1.0 / 3.0;

// Analytic surface: implicit form F(x) = 0, exact outward normals, surface
// area. Both test surfaces are closed, so there are no boundary concerns.
class SurfaceModel {
public:
  explicit SurfaceModel(SurfaceKind kind) : kind_(kind) {}

  SurfaceKind kind() const { return kind_; }

  // F(x); zero (to round-off) for points on the surface, positive outside.
  double implicit(const Vec3& x) const;
  Vec3 implicit_gradient(const Vec3& x) const;

  // Unit outward normal (parallel to the implicit gradient).
  Vec3 exact_normal(const Vec3& x) const;

  double area() const;

private:
  SurfaceKind kind_;
};

enum class NodeFamily { Icosahedral, Hammersley, PoissonDisk, FromFile };

struct PointCloud {
  std::vector<Vec3> points;
  NodeFamily family = NodeFamily::FromFile;

  int size() const { return static_cast<int>(points.size()); }
};

// Icosahedron subdivided `level` times, vertices projected to the unit
// sphere; N = 10*4^level + 2. Levels above 9 are rejected (memory guard).
PointCloud generate_icosahedral(int level);

// Maps N back to the subdivision level; throws if N is not 10*4^k + 2.
int icosahedral_level_for(int n);

// 2D Hammersley sequence (base-2 van der Corput x uniform index) pushed to
// the sphere with the equal-area cylindrical map z = 2t-1, theta = 2*pi*s.
PointCloud generate_hammersley(int n);

// Poisson-disk style nodes on the torus: 8x oversampled area-weighted
// candidates thinned by weighted sample elimination down to n_target.
PointCloud generate_poisson_torus(int n_target, std::uint64_t seed);

// Plain text node files: one "x y z" per line, '#' starts a comment.
// Loading rejects exactly coincident points.
PointCloud load_nodes(const std::string& path);
void save_nodes(const PointCloud& cloud, const std::string& path);

// Largest residual |F(x)| over the cloud; generators keep this <= 1e-12.
double max_implicit_residual(const SurfaceModel& surface, const PointCloud& cloud);

enum class FieldKind { SphereGaussianMix, TorusPolynomial };

// Test fields with closed-form surface gradient and Laplacian. The sphere
// field is a random mix of 50 Gaussian bumps; the torus field is a fixed
// degree-7 polynomial restricted to the surface.
class TestField {
public:
  static TestField sphere_gaussians(std::uint64_t seed);
  static TestField torus_polynomial();

  FieldKind kind() const { return kind_; }
  SurfaceKind surface() const;

  double value(const Vec3& x) const;
  Vec3 surface_gradient(const Vec3& x) const;  // tangential 3-vector
  double surface_laplacian(const Vec3& x) const;

  // Gaussian-mix parameters (empty for the torus field).
  const std::vector<Vec3>& centers() const { return centers_; }
  const std::vector<double>& amplitudes() const { return amplitudes_; }
  const std::vector<double>& widths() const { return widths_; }

private:
  explicit TestField(FieldKind kind) : kind_(kind) {}

  FieldKind kind_;
  std::vector<Vec3> centers_;
  std::vector<double> amplitudes_;
  std::vector<double> widths_;
};

Eigen::VectorXd sample_values(const TestField& field, const PointCloud& cloud);
Eigen::VectorXd sample_laplacian(const TestField& field, const PointCloud& cloud);

// Exact surface-gradient samples at every node (divergence test input);
// each row is orthogonal to the exact normal by construction.
Eigen::MatrixX3d sample_surface_gradient(const TestField& field, const PointCloud& cloud);

}  // namespace surfops
