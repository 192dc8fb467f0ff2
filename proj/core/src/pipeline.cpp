#include "share/pipeline.hpp"

#include <sstream>

#include <json.hpp>

#include "share/chamfer.hpp"
#include "share/error.hpp"

namespace share {

PipelineResult run_pipeline(const InputBundle& bundle, const OptimizeConfig& config,
                            const ProgressCallback& progress) {
  bundle.validate();
  config.validate();
  PipelineResult out;

  const HumanMask& first_mask = bundle.keyframe_mask(0);
  const HumanMask& last_mask = bundle.keyframe_mask(1);
  const double alpha = compute_scale_factor(bundle.keyframe_depth[0], bundle.keyframe_depth[1],
                                            first_mask, last_mask);
  out.keyframe_points[0] = back_project(bundle.keyframe_depth[0]);
  out.keyframe_points[1] = scale_point_map(back_project(bundle.keyframe_depth[1]), alpha);
  out.scene = merge_scene(out.keyframe_points[0], out.keyframe_points[1], first_mask, last_mask);
  out.scene.alpha = alpha;

  for (std::size_t k = 0; k < 2; ++k) {
    try {
      out.human_points[k] = extract_human_points(out.keyframe_points[k], bundle.keyframe_mask(k));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " (keyframe frame " +
                            std::to_string(bundle.motion.keyframes[k]) + ")");
    }
  }

  out.report = optimize(bundle.motion, out.human_points, config, progress);

  RunReport& s = out.summary;
  s.alpha = alpha;
  s.scene_points = out.scene.scene.size();
  s.overlap_pixels = out.scene.overlap_pixels;
  s.human_points = {out.human_points[0].size(), out.human_points[1].size()};
  s.initial_loss = out.report.loss_history.empty() ? out.report.final_loss : out.report.loss_history.front();
  s.final_loss = out.report.final_loss;
  s.iterations_run = out.report.iterations_run;
  return out;
}

EvalResult evaluate_translations(const InputBundle& bundle, std::span<const Vec3> predicted,
                                 std::span<const Vec3> truth) {
  const std::size_t t = bundle.frame_count();
  if (predicted.size() != t || truth.size() != t) {
    throw ValidationError("eval: frame counts differ (bundle " + std::to_string(t) + ", predicted " +
                          std::to_string(predicted.size()) + ", truth " + std::to_string(truth.size()) + ")");
  }
  std::vector<Vec3> predicted_roots;
  std::vector<Vec3> truth_roots;
  std::vector<PointSet> predicted_vertices;
  std::vector<PointSet> truth_vertices;
  for (std::size_t i = 0; i < t; ++i) {
    const BodyFrame& body = bundle.motion.frames[i];
    predicted_roots.push_back(body.canonical_root + predicted[i]);
    truth_roots.push_back(body.canonical_root + truth[i]);
    PointSet p;
    PointSet q;
    p.reserve(body.canonical_vertices.size());
    q.reserve(body.canonical_vertices.size());
    for (const auto& v : body.canonical_vertices) {
      p.push_back(v + predicted[i]);
      q.push_back(v + truth[i]);
    }
    predicted_vertices.push_back(std::move(p));
    truth_vertices.push_back(std::move(q));
  }
  EvalResult out;
  out.frames = t;
  out.mrpe = mrpe_stats(predicted_roots, truth_roots);
  out.v2v = v2v_stats(predicted_vertices, truth_vertices);
  return out;
}

std::string encode_eval_json(const EvalResult& result) {
  const nlohmann::json doc{
      {"frames", result.frames},
      {"mrpe", {{"mean", result.mrpe.mean}, {"std", result.mrpe.std}}},
      {"v2v", {{"mean", result.v2v.mean}, {"std", result.v2v.std}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace share
