#include "share/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "share/error.hpp"

namespace share {

KdTree::KdTree(std::span<const Vec3> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("kd-tree point count exceeds 32-bit index range");
  }
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<std::uint32_t>(i);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return id;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = points_[a][axis];
                     const double vb = points_[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  // Children hold [begin, mid) with values <= split and [mid, end) with values >= split.
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  return id;
}

NearestNeighbor KdTree::nearest(const Vec3& query) const {
  if (points_.empty()) throw ValidationError("nearest-neighbor query on an empty index");
  NearestNeighbor best{std::numeric_limits<std::size_t>::max(),
                       std::numeric_limits<double>::infinity()};
  search(0, query, best);
  return best;
}

void KdTree::search(std::int32_t node_id, const Vec3& query, NearestNeighbor& best) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      const double d2 = (query - points_[idx]).squaredNorm();
      if (d2 < best.distance_squared || (d2 == best.distance_squared && idx < best.index)) {
        best = {idx, d2};
      }
    }
    return;
  }
  const double delta = query[node.axis] - node.split;
  const std::int32_t near_child = delta < 0.0 ? node.left : node.right;
  const std::int32_t far_child = delta < 0.0 ? node.right : node.left;
  search(near_child, query, best);
  // Equality must still descend: a tie with a lower index may sit across the plane.
  if (delta * delta <= best.distance_squared) search(far_child, query, best);
}

}  // namespace share
