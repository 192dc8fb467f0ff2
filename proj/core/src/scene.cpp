#include "share/scene.hpp"

#include <cmath>
#include <vector>

#include "share/error.hpp"

namespace share {

double compute_scale_factor(const DepthFrame& first, const DepthFrame& last,
                            const HumanMask& first_mask, const HumanMask& last_mask) {
  first.validate();
  last.validate();
  if (!last.depth.same_shape(first.depth) || !first_mask.same_shape(first.depth) ||
      !last_mask.same_shape(first.depth)) {
    throw ValidationError("scale factor inputs must share dimensions");
  }

  double sum_first = 0.0;
  double sum_last = 0.0;
  std::size_t count = 0;
  for (int r = 0; r < first.height(); ++r) {
    for (int c = 0; c < first.width(); ++c) {
      if (!first.valid(r, c) || !last.valid(r, c)) continue;
      if (first_mask(r, c) || last_mask(r, c)) continue;
      sum_first += first.depth(r, c);
      sum_last += last.depth(r, c);
      ++count;
    }
  }
  if (count == 0) {
    throw ValidationError("no shared background pixels between keyframes");
  }
  const double mean_first = sum_first / static_cast<double>(count);
  const double mean_last = sum_last / static_cast<double>(count);
  if (!(mean_last > 0.0)) {
    throw ValidationError("degenerate depth: mean background depth of last keyframe is zero");
  }
  const double alpha = mean_first / mean_last;
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw ValidationError("degenerate depth: scale factor is not finite and positive");
  }
  return alpha;
}

SceneReconstruction merge_scene(const PointMap& first, const PointMap& last,
                                const HumanMask& first_mask, const HumanMask& last_mask) {
  const int h = first.height();
  const int w = first.width();
  if (!(last.height() == h && last.width() == w) || !first_mask.same_shape(h, w) ||
      !last_mask.same_shape(h, w)) {
    throw ValidationError("merge_scene inputs must share dimensions");
  }

  const Grid<std::int64_t> first_index = first.index_grid();
  const Grid<std::int64_t> last_index = last.index_grid();

  SceneReconstruction out;
  std::vector<ScenePoint> points;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const bool human_first = first_mask(r, c) != 0;
      const bool human_last = last_mask(r, c) != 0;
      const std::int64_t i1 = first_index(r, c);
      const std::int64_t i2 = last_index(r, c);
      const ScenePoint* p1 = i1 >= 0 ? &first.points()[static_cast<std::size_t>(i1)] : nullptr;
      const ScenePoint* p2 = i2 >= 0 ? &last.points()[static_cast<std::size_t>(i2)] : nullptr;

      if (human_first && human_last) {
        ++out.overlap_pixels;
        continue;
      }
      if (!human_first && !human_last) {
        if (p1 && p2) {
          ScenePoint avg;
          avg.pixel = {r, c};
          avg.position = 0.5 * (p1->position + p2->position);
          avg.color = 0.5 * (p1->color + p2->color);
          points.push_back(avg);
        } else if (p1) {
          points.push_back(*p1);
        } else if (p2) {
          points.push_back(*p2);
        }
        continue;
      }
      // Hole-fill from the keyframe where the pixel is background.
      if (human_last && p1) points.push_back(*p1);
      if (human_first && p2) points.push_back(*p2);
    }
  }
  out.scene = PointMap(h, w, std::move(points));
  return out;
}

}  // namespace share
