#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "share/geometry.hpp"
#include "share/optimizer.hpp"
#include "share/scene.hpp"

namespace share {

/// Everything the pipeline consumes for one video: two keyframe depth frames,
/// per-frame human masks, per-frame canonical bodies and initial translations.
///
/// On disk a bundle is a directory holding `manifest.json` plus raw
/// little-endian tensors (float32, uint8 for masks and validity). Shapes live
/// only in the manifest.
struct InputBundle {
  int height = 0;
  int width = 0;
  std::array<DepthFrame, 2> keyframe_depth;
  /// One mask per frame; only the keyframe masks feed the pipeline.
  std::vector<HumanMask> masks;
  MotionSequence motion;

  std::size_t frame_count() const noexcept { return motion.frame_count(); }
  std::size_t vertex_count() const noexcept;
  const HumanMask& keyframe_mask(std::size_t k) const { return masks.at(motion.keyframes.at(k)); }

  /// Cross-field consistency. load_bundle and write_bundle both call this.
  void validate() const;
};

inline constexpr int kManifestVersion = 1;

/// Binary little-endian PLY: float x y z, uchar red green blue per vertex, in
/// row-major pixel order. Colors are clamped to [0,1] and rounded to 8 bits.
std::string encode_scene_ply(const PointMap& scene);
void write_scene_ply(const PointMap& scene, const std::filesystem::path& path);

/// Contents of motion.json.
struct MotionRecord {
  std::array<std::size_t, 2> keyframes{0, 0};
  std::vector<Vec3> translations;
  std::vector<LossTerms> loss_history;
  LossTerms final_loss;
  std::size_t iterations_run = 0;
  OptimizeConfig config;
};

MotionRecord make_motion_record(const OptimizeReport& report, const MotionSequence& sequence,
                                const OptimizeConfig& config);
std::string encode_motion_json(const MotionRecord& record);
MotionRecord decode_motion_json(const std::string& text);
void write_motion_json(const OptimizeReport& report, const MotionSequence& sequence,
                       const OptimizeConfig& config, const std::filesystem::path& path);
MotionRecord read_motion_json(const std::filesystem::path& path);

/// Contents of report.json: scene statistics next to the optimization summary.
struct RunReport {
  double alpha = 1.0;
  std::size_t scene_points = 0;
  std::size_t overlap_pixels = 0;
  std::array<std::size_t, 2> human_points{0, 0};
  LossTerms initial_loss;
  LossTerms final_loss;
  std::size_t iterations_run = 0;
};

std::string encode_report_json(const RunReport& report);

/// truth.json: ground-truth per-frame translations of a synthetic bundle.
std::string encode_truth_json(const std::vector<Vec3>& translations);
std::vector<Vec3> read_truth_json(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

/// Collects output files in memory and publishes them together: every file is
/// first written under a temporary name, and only renamed once all writes
/// succeeded. On failure no staged file is left behind.
class StagedOutputs {
 public:
  void add(std::string file_name, std::string bytes);
  void commit(const std::filesystem::path& directory) const;

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

InputBundle load_bundle(const std::filesystem::path& directory);
/// Adds manifest.json and every tensor file of the bundle to `outputs`.
void stage_bundle(const InputBundle& bundle, StagedOutputs& outputs);
void write_bundle(const InputBundle& bundle, const std::filesystem::path& directory);

}  // namespace share
