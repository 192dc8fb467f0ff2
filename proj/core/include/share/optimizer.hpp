#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "share/chamfer.hpp"
#include "share/geometry.hpp"
#include "share/scene.hpp"
#include "share/trajectory.hpp"

namespace share {

/// One frame of the body model with pose and shape frozen: the posed mesh and
/// root joint at zero translation, plus the free translation.
struct BodyFrame {
  PointSet canonical_vertices;
  Vec3 canonical_root = Vec3::Zero();
  Vec3 translation = Vec3::Zero();
};

struct MotionSequence {
  std::vector<BodyFrame> frames;
  /// Zero-based; always {0, T - 1}.
  std::array<std::size_t, 2> keyframes{0, 0};
  std::vector<Vec3> initial_translations;

  std::size_t frame_count() const noexcept { return frames.size(); }
  void validate() const;

  /// canonical_root + translation per frame.
  RootTrajectory current_roots() const;
  /// canonical_root + initial translation per frame.
  RootTrajectory initial_roots() const;
  std::vector<Vec3> translations() const;
};

/// Builds a sequence whose current translations equal the initial ones.
MotionSequence make_motion_sequence(std::vector<PointSet> canonical_vertices,
                                    std::vector<Vec3> canonical_roots,
                                    std::vector<Vec3> initial_translations);

struct OptimizeConfig {
  int iterations = 600;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double gaussian_sigma = 3.0;
  /// Keep every n-th canonical vertex in the keyframe Chamfer terms.
  int vertex_stride = 1;
  double body_weight = 1.0;
  double root_weight = 1.0;

  void validate() const;
};

struct LossTerms {
  double total = 0.0;
  double body = 0.0;
  double root = 0.0;

  bool operator==(const LossTerms&) const = default;
};

struct OptimizeReport {
  /// Loss evaluated before each Adam step.
  std::vector<LossTerms> loss_history;
  /// Loss at the returned translations.
  LossTerms final_loss;
  std::vector<Vec3> final_translations;
  std::size_t iterations_run = 0;
};

struct LossAndGradients {
  LossTerms loss;
  std::vector<Vec3> gradients;
};

/// Human point sets extracted at the first and last keyframe.
using KeyframeTargets = std::array<PointSet, 2>;

/// Keyframe point map (already in the reference scale) and its human mask.
struct KeyframeObservation {
  PointMap points;
  HumanMask mask;
};

/// L = body_weight * (Chamfer at both keyframes) + root_weight * root loss,
/// as a function of all T translations. Search structures are built once.
class TranslationObjective {
 public:
  TranslationObjective(const MotionSequence& sequence, const KeyframeTargets& targets,
                       RootTrajectory smoothed_initial, int vertex_stride = 1,
                       double body_weight = 1.0, double root_weight = 1.0);

  std::size_t frame_count() const noexcept { return canonical_roots_.size(); }
  LossAndGradients evaluate(std::span<const Vec3> translations) const;

 private:
  std::array<std::size_t, 2> keyframes_;
  std::vector<Vec3> canonical_roots_;
  std::vector<TranslationChamfer> chamfer_;
  RootTrajectory smoothed_initial_;
  double body_weight_;
  double root_weight_;
};

/// Evaluates at the sequence's current translations with unit weights and
/// all vertices.
LossAndGradients total_loss_and_grads(const MotionSequence& sequence,
                                      const KeyframeTargets& targets,
                                      const RootTrajectory& smoothed_initial);

struct AdamState {
  std::vector<Vec3> first_moment;
  std::vector<Vec3> second_moment;

  explicit AdamState(std::size_t size = 0)
      : first_moment(size, Vec3::Zero()), second_moment(size, Vec3::Zero()) {}
};

/// One bias-corrected Adam update; `step` counts from 1. Throws
/// NumericalError naming the frame if any gradient is non-finite.
void adam_step(std::span<Vec3> params, std::span<const Vec3> gradients, AdamState& state,
               std::size_t step, const OptimizeConfig& config);

using ProgressCallback = std::function<void(std::size_t iteration, const LossTerms& loss)>;

/// Smooths the initial root trajectory once, then runs `iterations` Adam steps
/// on the translations. The sequence itself is not modified.
OptimizeReport optimize(const MotionSequence& sequence,
                        const std::array<KeyframeObservation, 2>& keyframes,
                        const OptimizeConfig& config, const ProgressCallback& progress = {});

/// Variant taking already extracted keyframe human point sets.
OptimizeReport optimize(const MotionSequence& sequence, const KeyframeTargets& targets,
                        const OptimizeConfig& config, const ProgressCallback& progress = {});

}  // namespace share
