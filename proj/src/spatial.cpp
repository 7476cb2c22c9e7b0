#include "surfops/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace surfops {

namespace {

constexpr int kLeafSize = 16;

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("kd-tree over an empty point set");
  order_.resize(points_.size());
  for (size_t i = 0; i < points_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(2 * points_.size() / kLeafSize + 8);
  root_ = build(0, static_cast<int>(points_.size()));
}

int KdTree::build(int begin, int end) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[idx].begin = begin;
    nodes_[idx].end = end;
    return idx;
  }

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     if (points_[a][axis] != points_[b][axis])
                       return points_[a][axis] < points_[b][axis];
                     return a < b;
                   });
  const double split = points_[order_[mid]][axis];

  Node stub = nodes_[idx];  // nodes_ may reallocate during recursion
  stub.axis = axis;
  stub.split = split;
  stub.left = build(begin, mid);
  stub.right = build(mid, end);
  nodes_[idx] = stub;
  return idx;
}

namespace {

// heap entries are (squared distance, index); lexicographic order so that
// ties at the cutoff distance resolve to the smaller index
bool heap_less(const std::pair<double, int>& a, const std::pair<double, int>& b) {
  if (a.first != b.first) return a.first < b.first;
  return a.second < b.second;
}

}  // namespace

void KdTree::knn_recurse(int node, const Vec3& q, int k,
                         std::vector<std::pair<double, int>>& heap) const {
  const Node& nd = nodes_[node];
  if (nd.left < 0) {
    for (int i = nd.begin; i < nd.end; ++i) {
      const int id = order_[i];
      const double d2 = (points_[id] - q).squaredNorm();
      std::pair<double, int> cand{d2, id};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), heap_less);
      } else if (heap_less(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), heap_less);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), heap_less);
      }
    }
    return;
  }
  const double delta = q[nd.axis] - nd.split;
  const int near = delta < 0.0 ? nd.left : nd.right;
  const int far = delta < 0.0 ? nd.right : nd.left;
  knn_recurse(near, q, k, heap);
  // the far side can still matter on exact distance ties (index tie-break)
  if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().first)
    knn_recurse(far, q, k, heap);
}

std::vector<std::pair<double, int>> KdTree::knn(const Vec3& query, int k) const {
  if (k < 1 || k > size()) throw std::invalid_argument("knn: k out of range");
  std::vector<std::pair<double, int>> heap;
  heap.reserve(k);
  knn_recurse(root_, query, k, heap);
  std::sort(heap.begin(), heap.end(), heap_less);
  for (auto& e : heap) e.first = std::sqrt(e.first);
  return heap;
}

void KdTree::ball_recurse(int node, const Vec3& q, double r_sq,
                          std::vector<int>& out) const {
  const Node& nd = nodes_[node];
  if (nd.left < 0) {
    for (int i = nd.begin; i < nd.end; ++i) {
      const int id = order_[i];
      if ((points_[id] - q).squaredNorm() <= r_sq) out.push_back(id);
    }
    return;
  }
  const double delta = q[nd.axis] - nd.split;
  const int near = delta < 0.0 ? nd.left : nd.right;
  const int far = delta < 0.0 ? nd.right : nd.left;
  ball_recurse(near, q, r_sq, out);
  if (delta * delta <= r_sq) ball_recurse(far, q, r_sq, out);
}

std::vector<int> KdTree::ball_squared(const Vec3& query, double radius_sq) const {
  std::vector<int> out;
  ball_recurse(root_, query, radius_sq, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> KdTree::ball(const Vec3& query, double radius) const {
  if (radius < 0.0) throw std::invalid_argument("ball: negative radius");
  return ball_squared(query, radius * radius);
}

int default_initial_size(int degree) {
  if (degree < 0) throw std::invalid_argument("degree must be nonnegative");
  return (degree + 1) * (degree + 2) / 2;
}

Stencil select_stencil(const KdTree& tree, const std::vector<Vec3>& points, int i,
                       int n, double tau) {
  if (i < 0 || i >= tree.size()) throw std::invalid_argument("stencil center out of range");
  if (n < 1 || n > tree.size())
    throw std::invalid_argument("initial stencil size exceeds point count");
  if (tau < 1.0) throw std::invalid_argument("radius factor tau must be >= 1");

  const Vec3& center = points[i];
  // squared cutoff derived directly from the k-th squared distance, so the
  // boundary neighbors are kept exactly when tau == 1
  std::vector<std::pair<double, int>> nearest = tree.knn(center, n);
  const double h_max = nearest.back().first;
  const double h_max_sq = (points[nearest.back().second] - center).squaredNorm();
  const double r_sq = tau * tau * h_max_sq;

  std::vector<int> ids = tree.ball_squared(center, r_sq);
  std::vector<std::pair<double, int>> ordered;
  ordered.reserve(ids.size());
  for (int id : ids) ordered.emplace_back((points[id] - center).squaredNorm(), id);
  std::sort(ordered.begin(), ordered.end(), heap_less);

  Stencil st;
  st.center = i;
  st.h_max = h_max;
  st.indices.reserve(ordered.size());
  for (const auto& [d2, id] : ordered) st.indices.push_back(id);
  return st;
}

}  // namespace surfops
