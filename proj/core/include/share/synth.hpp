#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "share/geometry.hpp"
#include "share/io.hpp"

namespace share {

struct SynthBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  Vec3 color = Vec3::Constant(0.5);
};

enum class BodyShell {
  /// Vertices on the camera-facing half of the ellipsoid (the part a depth
  /// map can observe).
  kFront,
  /// Vertices over the whole ellipsoid.
  kFull,
};

/// Synthetic scene with a known trajectory. Everything is expressed in camera
/// coordinates: x right, y down, z forward, meters.
struct SynthSpec {
  std::uint64_t seed = 0;
  int frames = 50;
  int width = 160;
  int height = 120;
  CameraIntrinsics intrinsics{140.0, 140.0, 79.5, 59.5};

  double floor_y = 1.2;
  Vec3 floor_color{0.55, 0.55, 0.5};
  double back_wall_z = 9.0;
  Vec3 wall_color{0.85, 0.8, 0.7};
  std::vector<SynthBox> boxes{
      {{-2.6, 0.4, 6.0}, {-1.6, 1.2, 7.0}, {0.6, 0.3, 0.2}},
      {{1.8, 0.6, 6.5}, {2.8, 1.2, 7.5}, {0.2, 0.4, 0.6}},
  };

  /// Ellipsoid proxy for the posed body; the canonical frame is centered on
  /// the ellipsoid so the ground-truth translation is its center.
  Vec3 body_semi_axes{0.22, 0.85, 0.14};
  int body_vertex_count = 300;
  BodyShell body_shell = BodyShell::kFront;
  /// Root joint in the canonical frame.
  Vec3 root_offset{0.0, 0.05, 0.0};
  Vec3 body_color{0.8, 0.25, 0.2};

  /// Ground-plane (x, z) endpoints of the walk. Progress along the path eases
  /// in and out, so the person starts and ends at rest.
  Eigen::Vector2d path_start{-1.3, 5.0};
  Eigen::Vector2d path_end{1.3, 4.2};
  /// Forward (z) excursion at mid-path.
  double path_bulge = 0.4;
  /// Vertical bob while walking.
  double bob_amplitude = 0.01;
  double bob_cycles = 4.0;

  double depth_noise_sigma = 0.0;
  /// Multiplies every depth of the last keyframe (depth-scale drift).
  double last_keyframe_depth_scale = 1.0;
  int mask_erosion = 0;
  /// Constant error added to every initial translation.
  Vec3 init_offset{0.3, 0.0, -0.4};
  /// Per-frame Gaussian jitter added to initial translations.
  double init_jitter_sigma = 0.0;
  /// Ends the walk next to its start so the keyframe masks overlap.
  bool force_mask_overlap = false;

  void validate() const;
};

struct SynthResult {
  InputBundle bundle;
  std::vector<Vec3> truth_translations;
};

/// Deterministic for a fixed spec. Float fields of the bundle are already
/// rounded to float32, so writing and reloading reproduces it exactly.
SynthResult generate(const SynthSpec& spec);

/// Vertices of the ellipsoid proxy in its canonical frame.
PointSet ellipsoid_vertices(const Vec3& semi_axes, int count, BodyShell shell);

/// Ground-truth body center at frame t.
Vec3 synth_path_position(const SynthSpec& spec, int frame);

/// Accepts a partial JSON object; missing fields keep their defaults, unknown
/// fields and type errors are rejected with the field name.
SynthSpec synth_spec_from_json(const std::string& text);
std::string synth_spec_to_json(const SynthSpec& spec);

}  // namespace share
