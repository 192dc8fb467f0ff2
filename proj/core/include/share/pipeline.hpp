#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "share/io.hpp"
#include "share/metrics.hpp"
#include "share/optimizer.hpp"
#include "share/scene.hpp"

namespace share {

struct PipelineResult {
  /// Keyframe point maps in the first keyframe's scale.
  std::array<PointMap, 2> keyframe_points;
  SceneReconstruction scene;
  KeyframeTargets human_points;
  OptimizeReport report;
  RunReport summary;
};

/// back_project -> compute_scale_factor -> scale_point_map -> merge_scene ->
/// extract_human_points -> optimize.
PipelineResult run_pipeline(const InputBundle& bundle, const OptimizeConfig& config,
                            const ProgressCallback& progress = {});

struct EvalResult {
  std::size_t frames = 0;
  ErrorStats mrpe;
  ErrorStats v2v;
};

/// Compares predicted against ground-truth translations using the bundle's
/// canonical roots and vertices.
EvalResult evaluate_translations(const InputBundle& bundle, std::span<const Vec3> predicted,
                                 std::span<const Vec3> truth);
std::string encode_eval_json(const EvalResult& result);

}  // namespace share
