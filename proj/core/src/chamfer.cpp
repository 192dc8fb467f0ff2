#include "share/chamfer.hpp"

#include "share/error.hpp"

namespace share {
namespace {

void require_nonempty(std::span<const Vec3> points, const char* what) {
  if (points.empty()) throw ValidationError(std::string("chamfer: ") + what + " point set is empty");
  for (const auto& p : points) {
    if (!p.allFinite()) throw ValidationError(std::string("chamfer: ") + what + " contains non-finite coordinates");
  }
}

// mean over queries of squared distance to the nearest indexed point
double directed_mean(const KdTree& index, std::span<const Vec3> queries) {
  double sum = 0.0;
  for (const auto& q : queries) sum += index.nearest(q).distance_squared;
  return sum / static_cast<double>(queries.size());
}

}  // namespace

PointSet extract_human_points(const PointMap& map, const HumanMask& mask) {
  if (!mask.same_shape(map.height(), map.width())) {
    throw ValidationError("human mask dimensions do not match the point map");
  }
  PointSet out;
  for (const auto& p : map.points()) {
    if (mask(p.pixel.row, p.pixel.col)) out.push_back(p.position);
  }
  if (out.empty()) throw ValidationError("human not visible in keyframe point map");
  return out;
}

double chamfer_symmetric(std::span<const Vec3> a, std::span<const Vec3> b) {
  require_nonempty(a, "first");
  require_nonempty(b, "second");
  const KdTree tree_a(a);
  const KdTree tree_b(b);
  return directed_mean(tree_b, a) + directed_mean(tree_a, b);
}

TranslationChamfer::TranslationChamfer(PointSet canonical, PointSet target) {
  require_nonempty(canonical, "canonical");
  require_nonempty(target, "target");
  canonical_ = KdTree(canonical);
  target_ = KdTree(target);
}

LossGradient TranslationChamfer::evaluate(const Vec3& translation) const {
  const std::size_t n_body = canonical_.size();
  const std::size_t n_target = target_.size();

  double body_sum = 0.0;
  Vec3 body_grad = Vec3::Zero();
  for (std::size_t i = 0; i < n_body; ++i) {
    const Vec3 x = canonical_.point(i) + translation;
    const NearestNeighbor nn = target_.nearest(x);
    body_sum += nn.distance_squared;
    body_grad += x - target_.point(nn.index);
  }

  double target_sum = 0.0;
  Vec3 target_grad = Vec3::Zero();
  for (std::size_t j = 0; j < n_target; ++j) {
    const Vec3& y = target_.point(j);
    const NearestNeighbor nn = canonical_.nearest(y - translation);
    target_sum += nn.distance_squared;
    target_grad += (canonical_.point(nn.index) + translation) - y;
  }

  const double inv_body = 1.0 / static_cast<double>(n_body);
  const double inv_target = 1.0 / static_cast<double>(n_target);
  LossGradient out;
  out.loss = body_sum * inv_body + target_sum * inv_target;
  out.gradient = (2.0 * inv_body) * body_grad + (2.0 * inv_target) * target_grad;
  return out;
}

LossGradient chamfer_grad_translation(std::span<const Vec3> canonical, const Vec3& translation,
                                      std::span<const Vec3> target) {
  if (!translation.allFinite()) throw ValidationError("chamfer: translation is not finite");
  return TranslationChamfer(PointSet(canonical.begin(), canonical.end()),
                            PointSet(target.begin(), target.end()))
      .evaluate(translation);
}

}  // namespace share
