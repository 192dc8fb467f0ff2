#pragma once

#include <span>
#include <vector>

#include "share/geometry.hpp"
#include "share/kdtree.hpp"
#include "share/scene.hpp"

namespace share {

using PointSet = std::vector<Vec3>;

/// Positions of the map points whose pixel is set in the mask. Throws when
/// nothing is left: a keyframe without human points cannot be grounded.
PointSet extract_human_points(const PointMap& map, const HumanMask& mask);

/// Symmetric squared-distance Chamfer:
///   mean_{x in a} min_y |x - y|^2 + mean_{y in b} min_x |x - y|^2.
double chamfer_symmetric(std::span<const Vec3> a, std::span<const Vec3> b);

struct LossGradient {
  double loss = 0.0;
  Vec3 gradient = Vec3::Zero();
};

/// Chamfer loss of a rigidly translated body against a static target set, with
/// the analytic gradient in the translation. Both kd-trees are built once; the
/// body tree is over canonical vertices and queried at (target - translation).
class TranslationChamfer {
 public:
  TranslationChamfer(PointSet canonical, PointSet target);

  /// Nearest-neighbor assignments are recomputed at every call and treated
  /// as constants when differentiating.
  LossGradient evaluate(const Vec3& translation) const;

  const KdTree& canonical_index() const noexcept { return canonical_; }
  const KdTree& target_index() const noexcept { return target_; }

 private:
  KdTree canonical_;
  KdTree target_;
};

LossGradient chamfer_grad_translation(std::span<const Vec3> canonical, const Vec3& translation,
                                      std::span<const Vec3> target);

}  // namespace share
