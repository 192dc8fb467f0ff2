#include "share/optimizer.hpp"

#include <cmath>
#include <string>

#include "share/error.hpp"

namespace share {
namespace {

PointSet stride_subsample(const PointSet& points, int stride) {
  if (stride <= 1) return points;
  PointSet out;
  out.reserve(points.size() / static_cast<std::size_t>(stride) + 1);
  for (std::size_t i = 0; i < points.size(); i += static_cast<std::size_t>(stride)) {
    out.push_back(points[i]);
  }
  return out;
}

void check_finite(const LossTerms& loss) {
  if (!std::isfinite(loss.total) || !std::isfinite(loss.body) || !std::isfinite(loss.root)) {
    throw NumericalError("loss became non-finite");
  }
}

}  // namespace

void MotionSequence::validate() const {
  const std::size_t t = frames.size();
  if (t < 2) throw ValidationError("motion sequence needs at least two frames");
  if (keyframes[0] != 0 || keyframes[1] != t - 1) {
    throw ValidationError("keyframes must be the first and last frame");
  }
  if (initial_translations.size() != t) {
    throw ValidationError("initial translation count does not match frame count");
  }
  for (std::size_t i = 0; i < t; ++i) {
    const BodyFrame& f = frames[i];
    if (f.canonical_vertices.empty()) {
      throw ValidationError("frame " + std::to_string(i) + " has no canonical vertices");
    }
    for (const auto& v : f.canonical_vertices) {
      if (!v.allFinite()) throw ValidationError("frame " + std::to_string(i) + " has a non-finite vertex");
    }
    if (!f.canonical_root.allFinite() || !f.translation.allFinite() ||
        !initial_translations[i].allFinite()) {
      throw ValidationError("frame " + std::to_string(i) + " has a non-finite root or translation");
    }
  }
}

RootTrajectory MotionSequence::current_roots() const {
  RootTrajectory roots;
  roots.reserve(frames.size());
  for (const auto& f : frames) roots.push_back(f.canonical_root + f.translation);
  return roots;
}

RootTrajectory MotionSequence::initial_roots() const {
  RootTrajectory roots;
  roots.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    roots.push_back(frames[i].canonical_root + initial_translations[i]);
  }
  return roots;
}

std::vector<Vec3> MotionSequence::translations() const {
  std::vector<Vec3> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.translation);
  return out;
}

MotionSequence make_motion_sequence(std::vector<PointSet> canonical_vertices,
                                    std::vector<Vec3> canonical_roots,
                                    std::vector<Vec3> initial_translations) {
  const std::size_t t = canonical_vertices.size();
  if (canonical_roots.size() != t || initial_translations.size() != t) {
    throw ValidationError("motion sequence inputs disagree on frame count");
  }
  MotionSequence seq;
  seq.frames.resize(t);
  for (std::size_t i = 0; i < t; ++i) {
    seq.frames[i].canonical_vertices = std::move(canonical_vertices[i]);
    seq.frames[i].canonical_root = canonical_roots[i];
    seq.frames[i].translation = initial_translations[i];
  }
  seq.keyframes = {0, t == 0 ? 0 : t - 1};
  seq.initial_translations = std::move(initial_translations);
  seq.validate();
  return seq;
}

void OptimizeConfig::validate() const {
  if (iterations < 0) throw ValidationError("iterations must be >= 0");
  if (!std::isfinite(learning_rate) || learning_rate <= 0.0) {
    throw ValidationError("learning rate must be finite and positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ValidationError("adam beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ValidationError("adam beta2 must lie in [0, 1)");
  if (!std::isfinite(epsilon) || epsilon < 0.0) throw ValidationError("adam epsilon must be finite and >= 0");
  if (!std::isfinite(gaussian_sigma) || gaussian_sigma <= 0.0) {
    throw ValidationError("gaussian sigma must be finite and positive");
  }
  if (vertex_stride < 1) throw ValidationError("vertex stride must be >= 1");
  if (!std::isfinite(body_weight) || body_weight < 0.0 || !std::isfinite(root_weight) ||
      root_weight < 0.0) {
    throw ValidationError("loss weights must be finite and >= 0");
  }
}

TranslationObjective::TranslationObjective(const MotionSequence& sequence,
                                           const KeyframeTargets& targets,
                                           RootTrajectory smoothed_initial, int vertex_stride,
                                           double body_weight, double root_weight)
    : keyframes_(sequence.keyframes),
      smoothed_initial_(std::move(smoothed_initial)),
      body_weight_(body_weight),
      root_weight_(root_weight) {
  sequence.validate();
  if (smoothed_initial_.size() != sequence.frame_count()) {
    throw ValidationError("smoothed reference trajectory length does not match frame count");
  }
  canonical_roots_.reserve(sequence.frame_count());
  for (const auto& f : sequence.frames) canonical_roots_.push_back(f.canonical_root);
  for (std::size_t k = 0; k < 2; ++k) {
    const BodyFrame& body = sequence.frames[keyframes_[k]];
    chamfer_.emplace_back(stride_subsample(body.canonical_vertices, vertex_stride), targets[k]);
  }
}

LossAndGradients TranslationObjective::evaluate(std::span<const Vec3> translations) const {
  if (translations.size() != canonical_roots_.size()) {
    throw ValidationError("translation count does not match frame count");
  }
  LossAndGradients out;
  RootTrajectory roots(translations.size());
  for (std::size_t t = 0; t < translations.size(); ++t) roots[t] = canonical_roots_[t] + translations[t];

  RootLoss root = root_loss(roots, smoothed_initial_);
  out.gradients.resize(translations.size());
  for (std::size_t t = 0; t < translations.size(); ++t) out.gradients[t] = root_weight_ * root.gradients[t];
  out.loss.root = root.loss;

  for (std::size_t k = 0; k < 2; ++k) {
    const std::size_t frame = keyframes_[k];
    const LossGradient body = chamfer_[k].evaluate(translations[frame]);
    out.loss.body += body.loss;
    out.gradients[frame] += body_weight_ * body.gradient;
  }
  out.loss.total = body_weight_ * out.loss.body + root_weight_ * out.loss.root;
  return out;
}

LossAndGradients total_loss_and_grads(const MotionSequence& sequence,
                                      const KeyframeTargets& targets,
                                      const RootTrajectory& smoothed_initial) {
  const TranslationObjective objective(sequence, targets, smoothed_initial);
  const std::vector<Vec3> translations = sequence.translations();
  return objective.evaluate(translations);
}

void adam_step(std::span<Vec3> params, std::span<const Vec3> gradients, AdamState& state,
               std::size_t step, const OptimizeConfig& config) {
  if (gradients.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ValidationError("adam_step: parameter, gradient and state sizes differ");
  }
  if (step < 1) throw ValidationError("adam_step: step index starts at 1");
  for (std::size_t i = 0; i < gradients.size(); ++i) {
    if (!gradients[i].allFinite()) {
      throw NumericalError("non-finite gradient at frame " + std::to_string(i));
    }
  }
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Vec3& m = state.first_moment[i];
    Vec3& v = state.second_moment[i];
    const Vec3& g = gradients[i];
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    for (int c = 0; c < 3; ++c) {
      const double m_hat = m[c] / correction1;
      const double v_hat = v[c] / correction2;
      params[i][c] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

OptimizeReport optimize(const MotionSequence& sequence, const KeyframeTargets& targets,
                        const OptimizeConfig& config, const ProgressCallback& progress) {
  config.validate();
  sequence.validate();
  const RootTrajectory smoothed = gaussian_smooth(sequence.initial_roots(), config.gaussian_sigma);
  const TranslationObjective objective(sequence, targets, smoothed, config.vertex_stride,
                                       config.body_weight, config.root_weight);

  std::vector<Vec3> translations = sequence.translations();
  AdamState state(translations.size());
  OptimizeReport report;
  report.loss_history.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 0; it < config.iterations; ++it) {
    const LossAndGradients eval = objective.evaluate(translations);
    check_finite(eval.loss);
    report.loss_history.push_back(eval.loss);
    if (progress) progress(static_cast<std::size_t>(it), eval.loss);
    adam_step(translations, eval.gradients, state, static_cast<std::size_t>(it) + 1, config);
  }
  report.final_loss = objective.evaluate(translations).loss;
  check_finite(report.final_loss);
  report.final_translations = std::move(translations);
  report.iterations_run = static_cast<std::size_t>(config.iterations);
  return report;
}

OptimizeReport optimize(const MotionSequence& sequence,
                        const std::array<KeyframeObservation, 2>& keyframes,
                        const OptimizeConfig& config, const ProgressCallback& progress) {
  KeyframeTargets targets;
  for (std::size_t k = 0; k < 2; ++k) {
    try {
      targets[k] = extract_human_points(keyframes[k].points, keyframes[k].mask);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " (keyframe " +
                            std::to_string(sequence.keyframes[k]) + ")");
    }
  }
  return optimize(sequence, targets, config, progress);
}

}  // namespace share
