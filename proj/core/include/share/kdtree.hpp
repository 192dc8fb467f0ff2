#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "share/geometry.hpp"

namespace share {

struct NearestNeighbor {
  std::size_t index = 0;
  double distance_squared = 0.0;
};

/// Exact nearest-neighbor index over a static 3D point set (balanced kd-tree,
/// median splits along the widest axis). Ties are resolved toward the lowest
/// stored index, so results match an exhaustive scan bit for bit.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 8);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  /// Requires a nonempty tree.
  NearestNeighbor nearest(const Vec3& query) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& query, NearestNeighbor& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_ = 8;
};

}  // namespace share
