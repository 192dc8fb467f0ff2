#pragma once

#include <span>
#include <vector>

#include "share/chamfer.hpp"
#include "share/geometry.hpp"

namespace share {

/// Mean and population standard deviation of per-frame errors, in meters.
struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean root position error: mean over frames of |predicted - truth|.
double mrpe(std::span<const Vec3> predicted, std::span<const Vec3> truth);
ErrorStats mrpe_stats(std::span<const Vec3> predicted, std::span<const Vec3> truth);

/// Vertex-to-vertex error: mean over frames and corresponding vertices of the
/// Euclidean distance. Frames must pair up vertex for vertex.
double v2v(std::span<const PointSet> predicted, std::span<const PointSet> truth);
/// Statistics over the per-frame mean vertex errors.
ErrorStats v2v_stats(std::span<const PointSet> predicted, std::span<const PointSet> truth);

}  // namespace share
