#include "share/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "share/error.hpp"

namespace share {
namespace {

constexpr double kMaxOffDiagonal = 1e-9;

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

CameraIntrinsics CameraIntrinsics::from_matrix(std::span<const double, 9> k) {
  // Row-major: [fx s cx; 0 fy cy; 0 0 1].
  const std::array<int, 4> off_diagonal = {1, 3, 6, 7};
  for (int i : off_diagonal) {
    if (!(std::abs(k[i]) <= kMaxOffDiagonal)) {
      std::ostringstream os;
      os << "intrinsics entry (" << i / 3 << "," << i % 3 << ") = " << k[i]
         << " must be zero (skew and off-diagonal terms are not supported)";
      throw ValidationError(os.str());
    }
  }
  if (!(std::abs(k[8] - 1.0) <= kMaxOffDiagonal)) {
    throw ValidationError("intrinsics entry (2,2) must be 1");
  }
  CameraIntrinsics out{k[0], k[4], k[2], k[5]};
  out.validate();
  return out;
}

std::array<double, 9> CameraIntrinsics::to_matrix() const {
  return {fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0};
}

void CameraIntrinsics::validate() const {
  if (!(std::isfinite(fx) && fx > 0.0) || !(std::isfinite(fy) && fy > 0.0)) {
    throw ValidationError("intrinsics focal lengths must be finite and positive");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw ValidationError("intrinsics principal point must be finite");
  }
}

void DepthFrame::validate() const {
  if (!valid.same_shape(depth) || !rgb.same_shape(depth)) {
    throw ValidationError("depth frame grids (depth, valid, rgb) must share dimensions");
  }
  intrinsics.validate();
  for (int r = 0; r < depth.height(); ++r) {
    for (int c = 0; c < depth.width(); ++c) {
      if (!valid(r, c)) continue;
      const double d = depth(r, c);
      if (!std::isfinite(d) || d <= 0.0) {
        std::ostringstream os;
        os << "depth at valid pixel (" << r << "," << c << ") is " << d
           << "; expected finite and > 0";
        throw ValidationError(os.str());
      }
    }
  }
}

PointMap::PointMap(int height, int width, std::vector<ScenePoint> points)
    : height_(height), width_(width), points_(std::move(points)) {
  if (height < 0 || width < 0) {
    throw ValidationError("point map dimensions must be nonnegative");
  }
  std::sort(points_.begin(), points_.end(),
            [](const ScenePoint& a, const ScenePoint& b) { return a.pixel < b.pixel; });
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.pixel.row < 0 || p.pixel.row >= height || p.pixel.col < 0 || p.pixel.col >= width) {
      throw ValidationError("point map pixel out of bounds");
    }
    if (i > 0 && points_[i - 1].pixel == p.pixel) {
      throw ValidationError("point map contains duplicate pixel (" +
                            std::to_string(p.pixel.row) + "," +
                            std::to_string(p.pixel.col) + ")");
    }
    if (!finite(p.position)) {
      throw ValidationError("point map contains a non-finite position");
    }
  }
}

Grid<std::int64_t> PointMap::index_grid() const {
  Grid<std::int64_t> grid(height_, width_, -1);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    grid(points_[i].pixel.row, points_[i].pixel.col) = static_cast<std::int64_t>(i);
  }
  return grid;
}

PointMap back_project(const DepthFrame& frame) {
  frame.validate();
  const CameraIntrinsics& k = frame.intrinsics;
  std::vector<ScenePoint> points;
  for (int r = 0; r < frame.height(); ++r) {
    for (int c = 0; c < frame.width(); ++c) {
      if (!frame.valid(r, c)) continue;
      const double d = frame.depth(r, c);
      ScenePoint p;
      p.pixel = {r, c};
      p.position = Vec3((c - k.cx) * d / k.fx, (r - k.cy) * d / k.fy, d);
      p.color = frame.rgb(r, c);
      points.push_back(p);
    }
  }
  return PointMap(frame.height(), frame.width(), std::move(points));
}

PointMap scale_point_map(const PointMap& map, double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw ValidationError("scale factor must be finite and positive");
  }
  std::vector<ScenePoint> points = map.points();
  for (auto& p : points) p.position *= alpha;
  return PointMap(map.height(), map.width(), std::move(points));
}

}  // namespace share
