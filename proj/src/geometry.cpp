#include "surfops/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "surfops/errors.hpp"
#include "surfops/rng.hpp"
#include "surfops/spatial.hpp"

namespace surfops {

namespace {

constexpr double kPi = std::numbers::pi;

double cylinder_radius(const Vec3& x) { return std::hypot(x.x(), x.y()); }

// Points must be pairwise distinct; exact coincidences break stencil
// selection and the minimum-distance invariant.
void require_distinct(const std::vector<Vec3>& pts, const std::string& what) {
  std::vector<int> order(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec3 &u = pts[a], &v = pts[b];
    if (u.x() != v.x()) return u.x() < v.x();
    if (u.y() != v.y()) return u.y() < v.y();
    return u.z() < v.z();
  });
  for (size_t i = 1; i < order.size(); ++i) {
    if (pts[order[i - 1]] == pts[order[i]]) {
      std::ostringstream msg;
      msg << what << ": coincident points at indices " << order[i - 1] << " and "
          << order[i];
      throw ParseError(msg.str());
    }
  }
}

}  // namespace

double SurfaceModel::implicit(const Vec3& x) const {
  if (kind_ == SurfaceKind::UnitSphere) return x.squaredNorm() - 1.0;
  const double w = 1.0 - cylinder_radius(x);
  return w * w + x.z() * x.z() - kTorusTubeRadius * kTorusTubeRadius;
}

Vec3 SurfaceModel::implicit_gradient(const Vec3& x) const {
  if (kind_ == SurfaceKind::UnitSphere) return 2.0 * x;
  const double rho = cylinder_radius(x);
  if (rho == 0.0)
    throw DegenerateGeometryError("torus implicit gradient undefined on the z-axis");
  const double s = 2.0 * (1.0 - rho) / rho;
  return {-s * x.x(), -s * x.y(), 2.0 * x.z()};
}

Vec3 SurfaceModel::exact_normal(const Vec3& x) const {
  const Vec3 g = implicit_gradient(x);
  const double n = g.norm();
  if (n == 0.0) throw DegenerateGeometryError("implicit gradient vanishes");
  return g / n;
}

double SurfaceModel::area() const {
  if (kind_ == SurfaceKind::UnitSphere) return 4.0 * kPi;
  return 4.0 * kPi * kPi * kTorusCenterRadius * kTorusTubeRadius;
}

// ---------------------------------------------------------------------------
// Node generators

PointCloud generate_icosahedral(int level) {
  if (level < 0) throw std::invalid_argument("icosahedral level must be nonnegative");
  if (level > 9)
    throw std::invalid_argument("icosahedral level above 9 exceeds the capacity limit");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},  {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},  {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},  {9, 8, 1}};

  for (int pass = 0; pass < level; ++pass) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = (verts[a] + verts[b]).normalized();
      int idx = static_cast<int>(verts.size());
      verts.push_back(m);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces.swap(next);
  }

  PointCloud cloud;
  cloud.points = std::move(verts);
  cloud.family = NodeFamily::Icosahedral;
  return cloud;
}

int icosahedral_level_for(int n) {
  long long count = 12;
  for (int level = 0; level <= 9; ++level) {
    if (count == n) return level;
    count = (count - 2) * 4 + 2;
  }
  throw std::invalid_argument("not an icosahedral node count (10*4^k + 2)");
}

namespace {

double van_der_corput(std::uint32_t bits) {
  bits = (bits << 16) | (bits >> 16);
  bits = ((bits & 0x00ff00ffu) << 8) | ((bits & 0xff00ff00u) >> 8);
  bits = ((bits & 0x0f0f0f0fu) << 4) | ((bits & 0xf0f0f0f0u) >> 4);
  bits = ((bits & 0x33333333u) << 2) | ((bits & 0xccccccccu) >> 2);
  bits = ((bits & 0x55555555u) << 1) | ((bits & 0xaaaaaaaau) >> 1);
  return static_cast<double>(bits) * 0x1.0p-32;
}

}  // namespace

PointCloud generate_hammersley(int n) {
  if (n < 1) throw std::invalid_argument("hammersley count must be positive");
  PointCloud cloud;
  cloud.points.reserve(n);
  cloud.family = NodeFamily::Hammersley;
  for (int i = 0; i < n; ++i) {
    const double s = van_der_corput(static_cast<std::uint32_t>(i));
    const double z = 2.0 * (static_cast<double>(i) / n) - 1.0;
    const double theta = 2.0 * kPi * s;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    cloud.points.emplace_back(rho * std::cos(theta), rho * std::sin(theta), z);
  }
  return cloud;
}

namespace {

// Binary max-heap over (weight, id) with position tracking, so weights can
// be decreased in place during sample elimination.
class EliminationHeap {
public:
  explicit EliminationHeap(std::vector<double>* weights) : w_(weights) {
    const int n = static_cast<int>(w_->size());
    heap_.resize(n);
    pos_.resize(n);
    for (int i = 0; i < n; ++i) {
      heap_[i] = i;
      pos_[i] = i;
    }
    for (int i = n / 2 - 1; i >= 0; --i) sift_down(i);
  }

  bool empty() const { return heap_.empty(); }
  int size() const { return static_cast<int>(heap_.size()); }

  int pop_max() {
    int top = heap_[0];
    swap_items(0, size() - 1);
    heap_.pop_back();
    pos_[top] = -1;
    if (!heap_.empty()) sift_down(0);
    return top;
  }

  bool contains(int id) const { return pos_[id] >= 0; }

  void decreased(int id) {
    if (pos_[id] >= 0) sift_down(pos_[id]);
  }

private:
  bool less(int a, int b) const {
    if ((*w_)[a] != (*w_)[b]) return (*w_)[a] < (*w_)[b];
    return a < b;
  }
  void swap_items(int i, int j) {
    std::swap(heap_[i], heap_[j]);
    pos_[heap_[i]] = i;
    pos_[heap_[j]] = j;
  }
  void sift_down(int i) {
    const int n = size();
    while (true) {
      int largest = i, l = 2 * i + 1, r = 2 * i + 2;
      if (l < n && less(heap_[largest], heap_[l])) largest = l;
      if (r < n && less(heap_[largest], heap_[r])) largest = r;
      if (largest == i) break;
      swap_items(i, largest);
      i = largest;
    }
    pos_[heap_[i]] = i;
  }

  std::vector<double>* w_;
  std::vector<int> heap_;
  std::vector<int> pos_;
};

}  // namespace

PointCloud generate_poisson_torus(int n_target, std::uint64_t seed) {
  if (n_target < 50) throw std::invalid_argument("poisson target below 50 nodes");

  // Area-weighted candidates: density proportional to 1 + (1/3) cos v.
  const int n_candidates = 8 * n_target;
  Rng rng(seed);
  std::vector<Vec3> candidates;
  candidates.reserve(n_candidates);
  const long long max_attempts = 64LL * n_candidates;
  long long attempts = 0;
  while (static_cast<int>(candidates.size()) < n_candidates) {
    if (++attempts > max_attempts)
      throw std::runtime_error("poisson candidate pool exhausted");
    const double u = rng.uniform(0.0, 2.0 * kPi);
    const double v = rng.uniform(0.0, 2.0 * kPi);
    const double w = kTorusCenterRadius + kTorusTubeRadius * std::cos(v);
    if (rng.uniform() * (kTorusCenterRadius + kTorusTubeRadius) > w) continue;
    candidates.emplace_back(w * std::cos(u), w * std::sin(u),
                            kTorusTubeRadius * std::sin(v));
  }

  // Weighted sample elimination (greedy removal of the most crowded sample).
  const double area = SurfaceModel(SurfaceKind::Torus).area();
  const double r_max = std::sqrt(area / (2.0 * std::sqrt(3.0) * n_target));
  const double d_max = 2.0 * r_max;
  auto pair_weight = [&](double d) {
    const double t = 1.0 - std::min(d, d_max) / d_max;
    const double t2 = t * t;
    return t2 * t2 * t2 * t2;  // (1 - d/d_max)^8
  };

  KdTree tree(candidates);
  std::vector<double> weights(candidates.size(), 0.0);
  for (size_t i = 0; i < candidates.size(); ++i) {
    for (int j : tree.ball(candidates[i], d_max)) {
      if (j == static_cast<int>(i)) continue;
      weights[i] += pair_weight((candidates[i] - candidates[j]).norm());
    }
  }

  EliminationHeap heap(&weights);
  while (heap.size() > n_target) {
    const int victim = heap.pop_max();
    for (int j : tree.ball(candidates[victim], d_max)) {
      if (j == victim || !heap.contains(j)) continue;
      weights[j] -= pair_weight((candidates[victim] - candidates[j]).norm());
      heap.decreased(j);
    }
  }

  PointCloud cloud;
  cloud.family = NodeFamily::PoissonDisk;
  cloud.points.reserve(n_target);
  for (size_t i = 0; i < candidates.size(); ++i)
    if (heap.contains(static_cast<int>(i))) cloud.points.push_back(candidates[i]);
  require_distinct(cloud.points, "poisson nodes");
  return cloud;
}

// ---------------------------------------------------------------------------
// Node files

PointCloud load_nodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open node file: " + path);
  PointCloud cloud;
  cloud.family = NodeFamily::FromFile;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x)) continue;  // blank or comment-only line
    if (!(ss >> y >> z)) {
      throw ParseError("node file " + path + " line " + std::to_string(lineno) +
                       ": expected three coordinates");
    }
    std::string rest;
    if (ss >> rest) {
      throw ParseError("node file " + path + " line " + std::to_string(lineno) +
                       ": trailing tokens");
    }
    cloud.points.emplace_back(x, y, z);
  }
  if (cloud.points.empty()) throw ParseError("node file " + path + " has no points");
  require_distinct(cloud.points, "node file " + path);
  return cloud;
}

void save_nodes(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write node file: " + path);
  out << "# " << cloud.size() << " nodes\n";
  char buf[96];
  for (const auto& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
}

double max_implicit_residual(const SurfaceModel& surface, const PointCloud& cloud) {
  double worst = 0.0;
  for (const auto& p : cloud.points)
    worst = std::max(worst, std::abs(surface.implicit(p)));
  return worst;
}

// ---------------------------------------------------------------------------
// Test fields

TestField TestField::sphere_gaussians(std::uint64_t seed) {
  TestField field(FieldKind::SphereGaussianMix);
  Rng rng(seed);
  constexpr int kTerms = 50;
  field.centers_.reserve(kTerms);
  field.amplitudes_.reserve(kTerms);
  field.widths_.reserve(kTerms);
  for (int j = 0; j < kTerms; ++j) {
    field.centers_.push_back(rng.unit_vector());
    field.amplitudes_.push_back(rng.normal(0.0, 1.0));
    double gamma = rng.normal(15.0, 4.0);
    while (gamma <= 0.0) gamma = rng.normal(15.0, 4.0);
    field.widths_.push_back(gamma);
  }
  return field;
}

TestField TestField::torus_polynomial() { return TestField(FieldKind::TorusPolynomial); }

SurfaceKind TestField::surface() const {
  return kind_ == FieldKind::SphereGaussianMix ? SurfaceKind::UnitSphere
                                               : SurfaceKind::Torus;
}

namespace {

// u = (x/8)(x^4 - 10 x^2 y^2 + 5 y^4)(r^2 - 60 z^2), r^2 = x^2 + y^2
double torus_quartic(double x, double y) {
  return x * x * x * x - 10.0 * x * x * y * y + 5.0 * y * y * y * y;
}

}  // namespace

double TestField::value(const Vec3& x) const {
  if (kind_ == FieldKind::SphereGaussianMix) {
    double sum = 0.0;
    for (size_t j = 0; j < centers_.size(); ++j)
      sum += amplitudes_[j] * std::exp(-widths_[j] * (x - centers_[j]).squaredNorm());
    return sum;
  }
  const double s = x.x() * x.x() + x.y() * x.y();
  return x.x() / 8.0 * torus_quartic(x.x(), x.y()) * (s - 60.0 * x.z() * x.z());
}

Vec3 TestField::surface_gradient(const Vec3& x) const {
  if (kind_ == FieldKind::SphereGaussianMix) {
    Vec3 sum = Vec3::Zero();
    for (size_t j = 0; j < centers_.size(); ++j) {
      const Vec3& y = centers_[j];
      const double e = std::exp(-widths_[j] * (x - y).squaredNorm());
      sum += 2.0 * amplitudes_[j] * widths_[j] * e * (y - x * x.dot(y));
    }
    return sum;
  }
  const double px = x.x(), py = x.y(), pz = x.z();
  const double s = px * px + py * py;
  const double q = torus_quartic(px, py);
  const double dq_dx = 4.0 * px * px * px - 20.0 * px * py * py;
  const double dq_dy = -20.0 * px * px * py + 20.0 * py * py * py;
  const double zfac = s - 60.0 * pz * pz;
  Vec3 grad;
  grad.x() = (q * zfac + px * (dq_dx * zfac + q * 2.0 * px)) / 8.0;
  grad.y() = px * (dq_dy * zfac + q * 2.0 * py) / 8.0;
  grad.z() = px * q * (-120.0 * pz) / 8.0;
  const Vec3 eta = SurfaceModel(SurfaceKind::Torus).exact_normal(x);
  return grad - eta * eta.dot(grad);
}

double TestField::surface_laplacian(const Vec3& x) const {
  if (kind_ == FieldKind::SphereGaussianMix) {
    double sum = 0.0;
    for (size_t j = 0; j < centers_.size(); ++j) {
      const double s = (x - centers_[j]).squaredNorm();
      const double e = std::exp(-widths_[j] * s);
      sum -= amplitudes_[j] * widths_[j] * (4.0 - s * (2.0 + widths_[j] * (4.0 - s))) * e;
    }
    return sum;
  }
  const double s = x.x() * x.x() + x.y() * x.y();
  const double r = std::sqrt(s);
  const double poly =
      10248.0 * s * s - 34335.0 * s * r + 41359.0 * s - 21320.0 * r + 4000.0;
  return -(3.0 * x.x() / (8.0 * s)) * torus_quartic(x.x(), x.y()) * poly;
}

Eigen::VectorXd sample_values(const TestField& field, const PointCloud& cloud) {
  Eigen::VectorXd v(cloud.size());
  for (int i = 0; i < cloud.size(); ++i) v[i] = field.value(cloud.points[i]);
  return v;
}

Eigen::VectorXd sample_laplacian(const TestField& field, const PointCloud& cloud) {
  Eigen::VectorXd v(cloud.size());
  for (int i = 0; i < cloud.size(); ++i) v[i] = field.surface_laplacian(cloud.points[i]);
  return v;
}

Eigen::MatrixX3d sample_surface_gradient(const TestField& field, const PointCloud& cloud) {
  Eigen::MatrixX3d g(cloud.size(), 3);
  for (int i = 0; i < cloud.size(); ++i)
    g.row(i) = field.surface_gradient(cloud.points[i]).transpose();
  return g;
}

}  // namespace surfops
