#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace share {

using Vec3 = Eigen::Vector3d;

/// Dense row-major h x w grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, const T& fill = T{})
      : height_(height), width_(width),
        data_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill) {}

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(int height, int width) const noexcept {
    return height_ == height && width_ == width;
  }
  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return same_shape(other.height(), other.width());
  }

  T& operator()(int row, int col) { return data_[offset(row, col)]; }
  const T& operator()(int row, int col) const { return data_[offset(row, col)]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t offset(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

/// Nonzero entries are "set" (valid depth, human pixel).
using Mask = Grid<std::uint8_t>;

struct Pixel {
  int row = 0;
  int col = 0;

  auto operator<=>(const Pixel&) const = default;
};

/// Zero-skew pinhole intrinsics. Pixel centers sit at integer coordinates.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Builds from a row-major 3x3 matrix. Rejects skew or off-diagonal
  /// entries whose magnitude exceeds 1e-9.
  static CameraIntrinsics from_matrix(std::span<const double, 9> k);
  std::array<double, 9> to_matrix() const;

  void validate() const;

  bool operator==(const CameraIntrinsics&) const = default;
};

/// One keyframe: metric depth, the depth estimator's validity mask, colors in
/// [0,1] and intrinsics.
struct DepthFrame {
  Grid<double> depth;
  Mask valid;
  Grid<Vec3> rgb;
  CameraIntrinsics intrinsics;

  int height() const noexcept { return depth.height(); }
  int width() const noexcept { return depth.width(); }

  /// Shapes agree and every valid depth is finite and positive.
  void validate() const;
};

struct ScenePoint {
  Pixel pixel;
  Vec3 position = Vec3::Zero();
  Vec3 color = Vec3::Zero();
};

/// XYZRGB points keyed by source pixel of an h x w image. Points are kept in
/// row-major pixel order and pixels are unique.
class PointMap {
 public:
  PointMap() = default;
  PointMap(int height, int width, std::vector<ScenePoint> points);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::vector<ScenePoint>& points() const noexcept { return points_; }

  /// Dense lookup table: entry (r, c) is the point index at that pixel or -1.
  Grid<std::int64_t> index_grid() const;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<ScenePoint> points_;
};

/// Unprojects every valid pixel: ((c - cx) d / fx, (r - cy) d / fy, d).
PointMap back_project(const DepthFrame& frame);

/// Multiplies every position by alpha; pixels and colors are untouched.
PointMap scale_point_map(const PointMap& map, double alpha);

}  // namespace share
