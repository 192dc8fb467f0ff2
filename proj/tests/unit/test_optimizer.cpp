#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "share/error.hpp"
#include "share/optimizer.hpp"
#include "share/synth.hpp"
#include "support/oracles.hpp"

namespace share {
namespace {

using testing::random_points;
using testing::random_vec;

MotionSequence sequence_from(const std::vector<PointSet>& bodies, const std::vector<Vec3>& roots,
                             const std::vector<Vec3>& translations) {
  return make_motion_sequence(bodies, roots, translations);
}

// Loss of a sequence written directly from brute-force pieces.
double oracle_total(const std::vector<PointSet>& bodies, const std::vector<Vec3>& roots,
                    const std::vector<Vec3>& translations, const KeyframeTargets& targets,
                    const RootTrajectory& smoothed) {
  const std::size_t last = bodies.size() - 1;
  double body = testing::brute_chamfer(testing::shifted(bodies[0], translations[0]), targets[0]) +
                testing::brute_chamfer(testing::shifted(bodies[last], translations[last]), targets[1]);
  RootTrajectory current;
  for (std::size_t t = 0; t < roots.size(); ++t) current.push_back(roots[t] + translations[t]);
  return body + testing::direct_root_loss(current, smoothed);
}

TEST(TotalLoss, ZeroAtGlobalMinimum) {
  // Dyadic coordinates keep (p + t) - t == p exact, so the minimum is exactly 0.
  std::mt19937_64 rng(1);
  const auto dyadic = [](PointSet pts, double step) {
    for (auto& p : pts) p = (p / step).array().round().matrix() * step;
    return pts;
  };
  const std::size_t n = 6;
  std::vector<PointSet> bodies(n, dyadic(random_points(rng, 15), 1.0 / 64));
  const std::vector<Vec3> roots(n, Vec3(0, 0.125, 0));
  const std::vector<Vec3> trans = dyadic(random_points(rng, n, 2.0), 1.0 / 8);
  const MotionSequence seq = sequence_from(bodies, roots, trans);
  const KeyframeTargets targets{testing::shifted(bodies[0], trans[0]),
                                testing::shifted(bodies[n - 1], trans[n - 1])};
  const LossAndGradients out = total_loss_and_grads(seq, targets, seq.current_roots());
  EXPECT_EQ(out.loss.total, 0.0);
  for (const auto& g : out.gradients) EXPECT_EQ(g, Vec3::Zero());
}

TEST(TotalLoss, SingletonBodiesTwoFrames) {
  const std::vector<PointSet> bodies{{Vec3(0, 0, 0)}, {Vec3(1, 0, 0)}};
  const std::vector<Vec3> roots{Vec3::Zero(), Vec3::Zero()};
  const std::vector<Vec3> trans{Vec3(0, 0, 1), Vec3(0, 2, 0)};
  const MotionSequence seq = sequence_from(bodies, roots, trans);
  // Keyframe 0 body at (0,0,1) vs target (0,0,0): 1 + 1 = 2.
  // Keyframe 1 body at (1,2,0) vs target (1,0,3): (4 + 9) * 2 = 26.
  const KeyframeTargets targets{PointSet{Vec3(0, 0, 0)}, PointSet{Vec3(1, 0, 3)}};
  const RootTrajectory smoothed{Vec3(5, 5, 5), Vec3(-1, 0, 2)};
  const LossAndGradients out = total_loss_and_grads(seq, targets, smoothed);
  EXPECT_EQ(out.loss.root, 0.0);
  EXPECT_EQ(out.loss.body, 28.0);
  EXPECT_EQ(out.loss.total, 28.0);
  EXPECT_EQ(out.gradients[0], Vec3(0, 0, 4));
  EXPECT_EQ(out.gradients[1], Vec3(0, 8, -12));
}

TEST(TotalLoss, MatchesFiniteDifferencesOverAllComponents) {
  std::mt19937_64 rng(2);
  const std::size_t n = 12;
  int checked = 0;
  for (int attempt = 0; attempt < 100 && checked < 5; ++attempt) {
    std::vector<PointSet> bodies;
    for (std::size_t t = 0; t < n; ++t) bodies.push_back(random_points(rng, 12));
    const std::vector<Vec3> roots = random_points(rng, n, 0.2);
    const std::vector<Vec3> trans = random_points(rng, n, 1.0);
    const KeyframeTargets targets{testing::shifted(random_points(rng, 15), trans[0]),
                                  testing::shifted(random_points(rng, 15), trans[n - 1])};
    if (testing::assignment_margin(testing::shifted(bodies[0], trans[0]), targets[0]) < 1e-3 ||
        testing::assignment_margin(testing::shifted(bodies[n - 1], trans[n - 1]), targets[1]) < 1e-3) {
      continue;
    }
    ++checked;
    const RootTrajectory smoothed = random_points(rng, n, 2.0);
    const MotionSequence seq = sequence_from(bodies, roots, trans);
    const LossAndGradients out = total_loss_and_grads(seq, targets, smoothed);
    const double direct = oracle_total(bodies, roots, trans, targets, smoothed);
    EXPECT_NEAR(out.loss.total, direct, 1e-12 * direct);
    const auto fd = testing::central_difference(
        [&](const std::vector<double>& x) {
          return oracle_total(bodies, roots, testing::unflatten(x), targets, smoothed);
        },
        testing::flatten(trans), 1e-6);
    const auto analytic = testing::flatten(out.gradients);
    ASSERT_EQ(analytic.size(), 3 * n);
    for (std::size_t i = 0; i < fd.size(); ++i) EXPECT_NEAR(analytic[i], fd[i], 1e-5) << i;
  }
  EXPECT_EQ(checked, 5);
}

TEST(AdamStep, ZeroGradientLeavesParams) {
  std::vector<Vec3> params{Vec3(1, 2, 3), Vec3(-1, 0, 4)};
  const std::vector<Vec3> grads(2, Vec3::Zero());
  AdamState state(2);
  adam_step(params, grads, state, 1, OptimizeConfig{});
  EXPECT_EQ(params[0], Vec3(1, 2, 3));
  EXPECT_EQ(params[1], Vec3(-1, 0, 4));
}

TEST(AdamStep, FirstStepHandComputed) {
  std::vector<Vec3> params{Vec3::Zero()};
  const std::vector<Vec3> grads{Vec3(1, 0, 0)};
  AdamState state(1);
  const OptimizeConfig config;
  adam_step(params, grads, state, 1, config);
  // m_hat = g, v_hat = g^2, so the step is lr * 1 / (1 + eps).
  const double expected = -0.01 * 1.0 / (1.0 + 1e-8);
  EXPECT_NEAR(params[0].x(), expected, 1e-18);
  EXPECT_EQ(params[0].y(), 0.0);
  EXPECT_EQ(params[0].z(), 0.0);
  EXPECT_NEAR(state.first_moment[0].x(), 0.1, 1e-16);
  EXPECT_NEAR(state.second_moment[0].x(), 0.001, 1e-16);
}

TEST(AdamStep, ConvergesOnQuadratic) {
  const Vec3 c(0.3, -0.2, 0.15);
  std::vector<Vec3> params{Vec3::Zero()};
  AdamState state(1);
  OptimizeConfig config;
  config.learning_rate = 0.3;
  for (std::size_t step = 1; step <= 100; ++step) {
    const std::vector<Vec3> grads{2.0 * (params[0] - c)};
    adam_step(params, grads, state, step, config);
  }
  EXPECT_LT((params[0] - c).norm(), 1e-3);
}

TEST(AdamStep, MatchesScalarReferenceUpdates) {
  // Scalar Adam written out per coordinate, run alongside the library.
  std::mt19937_64 rng(12);
  OptimizeConfig config;
  config.learning_rate = 0.05;
  std::vector<Vec3> params = random_points(rng, 4);
  std::vector<double> x = testing::flatten(params);
  std::vector<double> m(x.size(), 0.0);
  std::vector<double> v(x.size(), 0.0);
  AdamState state(params.size());
  for (std::size_t step = 1; step <= 50; ++step) {
    const std::vector<Vec3> grads = random_points(rng, 4, 3.0);
    const std::vector<double> g = testing::flatten(grads);
    adam_step(params, grads, state, step, config);
    for (std::size_t i = 0; i < x.size(); ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double m_hat = m[i] / (1.0 - std::pow(0.9, static_cast<double>(step)));
      const double v_hat = v[i] / (1.0 - std::pow(0.999, static_cast<double>(step)));
      x[i] -= 0.05 * m_hat / (std::sqrt(v_hat) + 1e-8);
    }
    const std::vector<double> got = testing::flatten(params);
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(got[i], x[i], 1e-14) << step;
  }
}

TEST(AdamStep, NonFiniteGradientNamesFrame) {
  std::vector<Vec3> params(4, Vec3::Zero());
  std::vector<Vec3> grads(4, Vec3::Zero());
  grads[2] = Vec3(0, std::numeric_limits<double>::quiet_NaN(), 0);
  AdamState state(4);
  try {
    adam_step(params, grads, state, 1, OptimizeConfig{});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("frame 2"), std::string::npos);
  }
  for (const auto& p : params) EXPECT_EQ(p, Vec3::Zero());
}

TEST(AdamStep, RejectsBadShapesAndStep) {
  std::vector<Vec3> params(2, Vec3::Zero());
  const std::vector<Vec3> grads(3, Vec3::Zero());
  AdamState state(2);
  EXPECT_THROW(adam_step(params, grads, state, 1, OptimizeConfig{}), ValidationError);
  const std::vector<Vec3> ok(2, Vec3::Zero());
  EXPECT_THROW(adam_step(params, ok, state, 0, OptimizeConfig{}), ValidationError);
}

TEST(OptimizeConfig, Validation) {
  OptimizeConfig c;
  EXPECT_NO_THROW(c.validate());
  c.iterations = -1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = OptimizeConfig{};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = OptimizeConfig{};
  c.beta1 = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = OptimizeConfig{};
  c.beta2 = -0.1;
  EXPECT_THROW(c.validate(), ValidationError);
}

// A dense body sampled on a full ellipsoid walking along x.
struct Walk {
  std::vector<PointSet> bodies;
  std::vector<Vec3> roots;
  std::vector<Vec3> truth;
};

Walk make_walk(std::size_t n, int vertices = 400) {
  Walk w;
  const PointSet body = ellipsoid_vertices(Vec3(0.25, 0.8, 0.15), vertices, BodyShell::kFull);
  for (std::size_t t = 0; t < n; ++t) {
    w.bodies.push_back(body);
    w.roots.emplace_back(0, 0.05, 0);
    const double u = static_cast<double>(t) / static_cast<double>(n - 1);
    w.truth.emplace_back(-1.0 + 2.0 * u, 1.0, 4.0 + 0.3 * u);
  }
  return w;
}

TEST(Optimize, ZeroIterationsIsNoOp) {
  const Walk w = make_walk(5, 50);
  const MotionSequence seq = sequence_from(w.bodies, w.roots, w.truth);
  const KeyframeTargets targets{testing::shifted(w.bodies[0], w.truth[0]),
                                testing::shifted(w.bodies[4], w.truth[4])};
  OptimizeConfig config;
  config.iterations = 0;
  const OptimizeReport r = optimize(seq, targets, config);
  EXPECT_EQ(r.iterations_run, 0u);
  EXPECT_TRUE(r.loss_history.empty());
  EXPECT_EQ(r.final_translations, w.truth);
}

TEST(Optimize, RecoversShiftedKeyframes) {
  SynthSpec spec;
  spec.init_offset = -Vec3(0.5, 0.0, 0.3);
  const SynthResult synth = generate(spec);
  const MotionSequence& seq = synth.bundle.motion;
  const std::size_t last = seq.frame_count() - 1;
  const auto& truth = synth.truth_translations;
  // Targets are the canonical vertices placed at the true translations.
  const KeyframeTargets targets{testing::shifted(seq.frames[0].canonical_vertices, truth[0]),
                                testing::shifted(seq.frames[last].canonical_vertices, truth[last])};
  const OptimizeReport r = optimize(seq, targets, OptimizeConfig{});
  EXPECT_EQ(r.iterations_run, 600u);
  EXPECT_EQ(r.loss_history.size(), 600u);
  EXPECT_LT((r.final_translations[0] - truth[0]).norm(), 1e-2);
  EXPECT_LT((r.final_translations[last] - truth[last]).norm(), 1e-2);
  EXPECT_LT(r.final_loss.total, r.loss_history.front().total);
}

TEST(Optimize, WalkKeepsSmoothedRelativeOffsets) {
  SynthSpec spec;
  const SynthResult synth = generate(spec);
  const MotionSequence& seq = synth.bundle.motion;
  const std::size_t n = seq.frame_count();
  ASSERT_EQ(n, 50u);
  const KeyframeTargets targets{testing::shifted(seq.frames[0].canonical_vertices, synth.truth_translations[0]),
                                testing::shifted(seq.frames[n - 1].canonical_vertices,
                                                 synth.truth_translations[n - 1])};
  const OptimizeConfig config;
  const OptimizeReport r = optimize(seq, targets, config);
  const RootTrajectory smoothed = gaussian_smooth(seq.initial_roots(), config.gaussian_sigma);
  RootTrajectory final_roots;
  for (std::size_t t = 0; t < n; ++t) final_roots.push_back(seq.frames[t].canonical_root + r.final_translations[t]);
  for (auto [k, kp] : {std::pair<std::size_t, std::size_t>{0, n - 1}, {n - 1, 0}}) {
    const auto d = relative_vectors(final_roots, k, kp);
    const auto d0 = relative_vectors(smoothed, k, kp);
    for (std::size_t i = 0; i < d.vectors.size(); ++i) {
      EXPECT_LT((d.vectors[i] - d0.vectors[i]).norm(), 2e-2) << "anchor " << k << " frame " << d.frames[i];
    }
  }
}

TEST(Optimize, LossDecreasesOnNoiselessInstancesProperty) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    std::vector<PointSet> bodies;
    for (std::size_t t = 0; t < n; ++t) bodies.push_back(random_points(rng, 8, 0.3));
    const std::vector<Vec3> roots = random_points(rng, n, 0.1);
    const std::vector<Vec3> truth = random_points(rng, n, 2.0);
    std::vector<Vec3> init;
    for (const auto& t : truth) init.push_back(t + random_vec(rng, 0.3));
    const MotionSequence seq = sequence_from(bodies, roots, init);
    const KeyframeTargets targets{testing::shifted(bodies[0], truth[0]),
                                  testing::shifted(bodies[n - 1], truth[n - 1])};
    OptimizeConfig config;
    config.iterations = 60;
    const OptimizeReport r = optimize(seq, targets, config);
    if (r.loss_history.front().total > 1e-8) {
      ASSERT_LT(r.final_loss.total, r.loss_history.front().total) << trial;
    }
  }
}

TEST(Optimize, CanonicalDataFrozenProperty) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    std::vector<PointSet> bodies;
    for (std::size_t t = 0; t < n; ++t) bodies.push_back(random_points(rng, 5, 0.3));
    const MotionSequence seq = sequence_from(bodies, random_points(rng, n, 0.1), random_points(rng, n));
    const MotionSequence before = seq;
    const KeyframeTargets targets{random_points(rng, 6), random_points(rng, 6)};
    OptimizeConfig config;
    config.iterations = 10;
    const OptimizeReport r = optimize(seq, targets, config);
    ASSERT_EQ(r.final_translations.size(), n);
    for (std::size_t t = 0; t < n; ++t) {
      ASSERT_EQ(seq.frames[t].canonical_vertices, before.frames[t].canonical_vertices);
      ASSERT_EQ(seq.frames[t].canonical_root, before.frames[t].canonical_root);
      ASSERT_EQ(seq.frames[t].translation, before.frames[t].translation);
    }
  }
}

void expect_identical(const OptimizeReport& a, const OptimizeReport& b) {
  ASSERT_EQ(a.iterations_run, b.iterations_run);
  ASSERT_EQ(a.loss_history, b.loss_history);
  ASSERT_EQ(a.final_loss, b.final_loss);
  ASSERT_EQ(a.final_translations, b.final_translations);
}

TEST(Optimize, DeterminismProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    std::vector<PointSet> bodies;
    for (std::size_t t = 0; t < n; ++t) bodies.push_back(random_points(rng, 6, 0.3));
    const MotionSequence seq = sequence_from(bodies, random_points(rng, n, 0.1), random_points(rng, n));
    const KeyframeTargets targets{random_points(rng, 7), random_points(rng, 7)};
    OptimizeConfig config;
    config.iterations = 15;
    expect_identical(optimize(seq, targets, config), optimize(seq, targets, config));
  }
}

TEST(Optimize, RootOnlyKeepsRigidConsistency) {
  std::mt19937_64 rng(6);
  const std::size_t n = 15;
  const Walk w = make_walk(n, 40);
  std::vector<Vec3> init;
  for (const auto& t : w.truth) init.push_back(t + random_vec(rng, 0.05));
  const MotionSequence seq = sequence_from(w.bodies, w.roots, init);
  // Targets are the already grounded keyframe meshes.
  const KeyframeTargets targets{testing::shifted(w.bodies[0], init[0]),
                                testing::shifted(w.bodies[n - 1], init[n - 1])};
  OptimizeConfig config;
  config.body_weight = 0.0;
  const OptimizeReport r = optimize(seq, targets, config);
  const RootTrajectory smoothed = gaussian_smooth(seq.initial_roots(), config.gaussian_sigma);
  RootTrajectory final_roots;
  for (std::size_t t = 0; t < n; ++t) final_roots.push_back(w.roots[t] + r.final_translations[t]);
  for (auto [k, kp] : {std::pair<std::size_t, std::size_t>{0, n - 1}, {n - 1, 0}}) {
    const auto d = relative_vectors(final_roots, k, kp);
    const auto d0 = relative_vectors(smoothed, k, kp);
    for (std::size_t i = 0; i < d.vectors.size(); ++i) {
      EXPECT_LT((d.vectors[i] - d0.vectors[i]).norm(), 1e-6) << "anchor " << k << " frame " << d.frames[i];
    }
  }
}

TEST(Optimize, EmptyHumanFailsBeforeIterating) {
  const std::vector<PointSet> bodies(2, PointSet{Vec3::Zero()});
  const MotionSequence seq = sequence_from(bodies, {Vec3::Zero(), Vec3::Zero()}, {Vec3::Zero(), Vec3::Zero()});
  const PointMap pm(2, 2, {ScenePoint{{0, 0}, Vec3(0, 0, 1), Vec3::Zero()}});
  HumanMask human(2, 2, 0);
  human(0, 0) = 1;
  const std::array<KeyframeObservation, 2> obs{KeyframeObservation{pm, human},
                                               KeyframeObservation{pm, HumanMask(2, 2, 0)}};
  int calls = 0;
  try {
    optimize(seq, obs, OptimizeConfig{}, [&](std::size_t, const LossTerms&) { ++calls; });
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("human not visible"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("keyframe 1"), std::string::npos);
  }
  EXPECT_EQ(calls, 0);
}

}  // namespace
}  // namespace share
