#pragma once

#include <cstddef>

#include "share/geometry.hpp"

namespace share {

/// Per-frame person segmentation; nonzero marks a human pixel.
using HumanMask = Mask;

struct SceneReconstruction {
  PointMap scene;
  double alpha = 1.0;
  /// Pixels inside both keyframe human masks. They have no background
  /// observation and are left out of the scene.
  std::size_t overlap_pixels = 0;
};

/// Ratio of mean depths, first keyframe over last, over pixels that are valid
/// in both frames and outside both human masks.
double compute_scale_factor(const DepthFrame& first, const DepthFrame& last,
                            const HumanMask& first_mask, const HumanMask& last_mask);

/// Merges two keyframe point maps (the last one already rescaled) into one
/// background map:
///  - background in both maps: midpoint of position and color;
///  - background in one map only: that point;
///  - human in the last keyframe only: the first keyframe's point;
///  - human in the first keyframe only: the last keyframe's point;
///  - human in both: dropped and counted in overlap_pixels.
SceneReconstruction merge_scene(const PointMap& first, const PointMap& last,
                                const HumanMask& first_mask, const HumanMask& last_mask);

}  // namespace share
