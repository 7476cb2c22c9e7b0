#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "surfops/geometry.hpp"

namespace surfops {

// Static kd-tree over 3D points supporting exact KNN and ball queries.
// Results match a brute-force scan: KNN ties at the cutoff distance are
// broken by ascending point index, ball queries use an inclusive radius.
class KdTree {
public:
  explicit KdTree(std::vector<Vec3> points);

  int size() const { return static_cast<int>(points_.size()); }

  // k nearest neighbors sorted by (distance, index); k <= size().
  std::vector<std::pair<double, int>> knn(const Vec3& query, int k) const;

  // Indices with |p - query| <= radius, in ascending index order.
  std::vector<int> ball(const Vec3& query, double radius) const;

  // Same, with the squared radius given directly (avoids the sqrt/square
  // round trip so boundary points are kept exactly).
  std::vector<int> ball_squared(const Vec3& query, double radius_sq) const;

  const std::vector<Vec3>& points() const { return points_; }

private:
  struct Node {
    int left = -1, right = -1;  // children; -1 for leaves
    int begin = 0, end = 0;     // leaf range into order_
    int axis = 0;
    double split = 0.0;
  };

  int build(int begin, int end);
  void knn_recurse(int node, const Vec3& q, int k,
                   std::vector<std::pair<double, int>>& heap) const;
  void ball_recurse(int node, const Vec3& q, double r_sq,
                    std::vector<int>& out) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Initial stencil size L = dim P^2_l = (l+1)(l+2)/2.
int default_initial_size(int degree);

struct Stencil {
  int center = -1;
  std::vector<int> indices;  // sorted by distance from the center; first == center
  double h_max = 0.0;        // distance to the n-th initial neighbor

  int size() const { return static_cast<int>(indices.size()); }
};

// Ball-search stencil selection: take the n nearest neighbors of node i,
// set h_max to the largest of those distances, then keep every point within
// tau*h_max (inclusive). Ordered by distance, ties by ascending index.
Stencil select_stencil(const KdTree& tree, const std::vector<Vec3>& points,
                       int i, int n, double tau);

}  // namespace surfops
