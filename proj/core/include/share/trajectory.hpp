#pragma once

#include <cstddef>
#include <vector>

#include "share/geometry.hpp"

namespace share {

/// Root-joint positions, one per frame.
using RootTrajectory = std::vector<Vec3>;

/// Displacements of every frame except `excluded` from the `anchor` frame,
/// ordered by frame index. `frames[i]` is the frame that `vectors[i]` belongs to.
struct RelativeRootVectors {
  std::size_t anchor = 0;
  std::size_t excluded = 0;
  std::vector<std::size_t> frames;
  std::vector<Vec3> vectors;
};

/// Half-width of the truncated Gaussian kernel: ceil(4 sigma).
int gaussian_radius(double sigma);

/// Normalized Gaussian weights for offsets -radius..radius.
std::vector<double> gaussian_kernel(double sigma);

/// Per-channel Gaussian filter with half-sample symmetric reflection at both
/// ends (d c b a | a b c d | d c b a).
RootTrajectory gaussian_smooth(const RootTrajectory& trajectory, double sigma);

/// Indices are zero-based; anchor and excluded must be the two distinct end
/// frames of the trajectory.
RelativeRootVectors relative_vectors(const RootTrajectory& trajectory, std::size_t anchor,
                                     std::size_t excluded);

struct RootLoss {
  double loss = 0.0;
  /// d loss / d root_t, equal to d loss / d translation_t.
  std::vector<Vec3> gradients;
};

/// Relative root-joint loss against the smoothed initial trajectory, summed
/// over the two end-frame anchors and divided by T - 1.
RootLoss root_loss(const RootTrajectory& current, const RootTrajectory& smoothed_initial);

}  // namespace share
