#include "share/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <json.hpp>

#include "share/error.hpp"

namespace share {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rounds to the nearest float32. The volatile store keeps GCC 11's SLP
// vectorizer at -O3 from folding the double->float->double pair away.
double f32(double v) {
  volatile float narrowed = static_cast<float>(v);
  return narrowed;
}
Vec3 f32(const Vec3& v) { return {f32(v.x()), f32(v.y()), f32(v.z())}; }

enum class Surface { kNone, kFloor, kWall, kBox, kBody };

struct Hit {
  double depth = kInf;
  Surface surface = Surface::kNone;
  Vec3 color = Vec3::Zero();
};

// Rays leave the camera center along (u, v, 1), so the ray parameter equals depth.
Vec3 pixel_ray(const CameraIntrinsics& k, int row, int col) {
  return {(col - k.cx) / k.fx, (row - k.cy) / k.fy, 1.0};
}

double ray_box(const Vec3& dir, const SynthBox& box) {
  double t_near = 0.0;
  double t_far = kInf;
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (box.min[a] > 0.0 || box.max[a] < 0.0) return kInf;
      continue;
    }
    double t0 = box.min[a] / dir[a];
    double t1 = box.max[a] / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return kInf;
  }
  return t_near > 0.0 ? t_near : kInf;
}

double ray_ellipsoid(const Vec3& dir, const Vec3& center, const Vec3& semi_axes) {
  const Vec3 d = dir.cwiseQuotient(semi_axes);
  const Vec3 c = center.cwiseQuotient(semi_axes);
  const double a = d.squaredNorm();
  const double b = -2.0 * d.dot(c);
  const double cc = c.squaredNorm() - 1.0;
  const double disc = b * b - 4.0 * a * cc;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double t0 = (-b - sq) / (2.0 * a);
  const double t1 = (-b + sq) / (2.0 * a);
  if (t0 > 0.0) return t0;
  if (t1 > 0.0) return t1;
  return kInf;
}

Hit trace(const SynthSpec& spec, const Vec3& dir, const Vec3* body_center) {
  Hit hit;
  auto consider = [&](double t, Surface s, const Vec3& color) {
    if (t < hit.depth) hit = {t, s, color};
  };
  if (dir.y() > 0.0) consider(spec.floor_y / dir.y(), Surface::kFloor, spec.floor_color);
  consider(spec.back_wall_z, Surface::kWall, spec.wall_color);
  for (const auto& box : spec.boxes) consider(ray_box(dir, box), Surface::kBox, box.color);
  if (body_center) {
    consider(ray_ellipsoid(dir, *body_center, spec.body_semi_axes), Surface::kBody, spec.body_color);
  }
  return hit;
}

HumanMask erode(const HumanMask& mask, int radius) {
  if (radius <= 0) return mask;
  HumanMask out(mask.height(), mask.width(), 0);
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask(r, c)) continue;
      bool keep = true;
      for (int dr = -radius; dr <= radius && keep; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= mask.height() || cc < 0 || cc >= mask.width()) continue;
          if (!mask(rr, cc)) {
            keep = false;
            break;
          }
        }
      }
      out(r, c) = keep ? 1 : 0;
    }
  }
  return out;
}

void check_in_frustum(const SynthSpec& spec, const Vec3& center, int frame) {
  const Vec3& a = spec.body_semi_axes;
  const CameraIntrinsics& k = spec.intrinsics;
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 p = center + Vec3((corner & 1) ? a.x() : -a.x(), (corner & 2) ? a.y() : -a.y(),
                                 (corner & 4) ? a.z() : -a.z());
    const double u = k.fx * p.x() / p.z() + k.cx;
    const double v = k.fy * p.y() / p.z() + k.cy;
    if (p.z() <= 0.0 || u < 0.0 || u > spec.width - 1 || v < 0.0 || v > spec.height - 1) {
      throw ValidationError("synth: human outside camera frustum at keyframe frame " +
                            std::to_string(frame));
    }
  }
}

}  // namespace

void SynthSpec::validate() const {
  if (frames < 2) throw ValidationError("synth spec: field 'frames' must be >= 2");
  if (width < 1 || height < 1) throw ValidationError("synth spec: fields 'width' and 'height' must be >= 1");
  intrinsics.validate();
  if (!(floor_y > 0.0)) throw ValidationError("synth spec: field 'floor_y' must be > 0 (floor below the camera)");
  if (!(back_wall_z > 0.0)) throw ValidationError("synth spec: field 'back_wall_z' must be > 0");
  for (const auto& b : boxes) {
    if (!(b.min.array() < b.max.array()).all()) {
      throw ValidationError("synth spec: field 'boxes' entries need min < max on every axis");
    }
  }
  if (!(body_semi_axes.array() > 0.0).all()) {
    throw ValidationError("synth spec: field 'body_semi_axes' must be positive");
  }
  if (body_vertex_count < 1) throw ValidationError("synth spec: field 'body_vertex_count' must be >= 1");
  if (!(depth_noise_sigma >= 0.0)) throw ValidationError("synth spec: field 'depth_noise_sigma' must be >= 0");
  if (!(last_keyframe_depth_scale > 0.0) || !std::isfinite(last_keyframe_depth_scale)) {
    throw ValidationError("synth spec: field 'last_keyframe_depth_scale' must be finite and > 0");
  }
  if (mask_erosion < 0) throw ValidationError("synth spec: field 'mask_erosion' must be >= 0");
  if (!(init_jitter_sigma >= 0.0)) throw ValidationError("synth spec: field 'init_jitter_sigma' must be >= 0");
}

PointSet ellipsoid_vertices(const Vec3& semi_axes, int count, BodyShell shell) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  PointSet out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double s = (i + 0.5) / count;
    // Fibonacci lattice; the front shell spans z in [-1, 0] (facing the camera).
    const double z = shell == BodyShell::kFront ? -s : 1.0 - 2.0 * s;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.emplace_back(semi_axes.x() * r * std::cos(phi), semi_axes.y() * r * std::sin(phi),
                     semi_axes.z() * z);
  }
  return out;
}

Vec3 synth_path_position(const SynthSpec& spec, int frame) {
  const double u = spec.frames > 1 ? static_cast<double>(frame) / (spec.frames - 1) : 0.0;
  const double s = u - std::sin(2.0 * std::numbers::pi * u) / (2.0 * std::numbers::pi);
  Eigen::Vector2d end = spec.path_end;
  if (spec.force_mask_overlap) end = spec.path_start + Eigen::Vector2d(0.1, 0.0);
  const Eigen::Vector2d ground = (1.0 - s) * spec.path_start + s * end;
  const double bob = spec.bob_amplitude * std::sin(2.0 * std::numbers::pi * spec.bob_cycles * s);
  const double y = spec.floor_y - spec.body_semi_axes.y() - std::abs(bob);
  return {ground.x(), y, ground.y() + spec.path_bulge * std::sin(std::numbers::pi * s)};
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int t_count = spec.frames;
  const int h = spec.height;
  const int w = spec.width;
  const std::array<int, 2> keyframes{0, t_count - 1};

  SynthResult out;
  std::vector<Vec3> truth;
  for (int t = 0; t < t_count; ++t) truth.push_back(synth_path_position(spec, t));
  for (int k : keyframes) check_in_frustum(spec, truth[static_cast<std::size_t>(k)], k);

  InputBundle& bundle = out.bundle;
  bundle.height = h;
  bundle.width = w;

  // Per-frame silhouettes (body is the closest surface along the ray).
  bundle.masks.reserve(static_cast<std::size_t>(t_count));
  for (int t = 0; t < t_count; ++t) {
    HumanMask mask(h, w, 0);
    const Vec3& center = truth[static_cast<std::size_t>(t)];
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const Vec3 dir = pixel_ray(spec.intrinsics, r, c);
        if (trace(spec, dir, &center).surface == Surface::kBody) mask(r, c) = 1;
      }
    }
    bundle.masks.push_back(erode(mask, spec.mask_erosion));
  }

  for (std::size_t k = 0; k < 2; ++k) {
    const int frame = keyframes[k];
    const Vec3& center = truth[static_cast<std::size_t>(frame)];
    DepthFrame depth_frame;
    depth_frame.intrinsics = spec.intrinsics;
    depth_frame.depth = Grid<double>(h, w, 0.0);
    depth_frame.valid = Mask(h, w, 0);
    depth_frame.rgb = Grid<Vec3>(h, w, Vec3::Zero());
    const double scale = k == 1 ? spec.last_keyframe_depth_scale : 1.0;
    bool body_seen = false;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const Hit hit = trace(spec, pixel_ray(spec.intrinsics, r, c), &center);
        if (hit.surface == Surface::kNone) continue;
        body_seen = body_seen || hit.surface == Surface::kBody;
        double d = hit.depth;
        if (spec.depth_noise_sigma > 0.0) d += spec.depth_noise_sigma * normal(rng);
        d = std::max(d, 1e-3) * scale;
        depth_frame.depth(r, c) = f32(d);
        depth_frame.valid(r, c) = 1;
        depth_frame.rgb(r, c) = f32(hit.color);
      }
    }
    if (!body_seen || !std::ranges::any_of(bundle.masks[static_cast<std::size_t>(frame)].data(),
                                           [](std::uint8_t m) { return m != 0; })) {
      throw ValidationError("synth: human not visible at keyframe frame " + std::to_string(frame));
    }
    bundle.keyframe_depth[k] = std::move(depth_frame);
  }

  const PointSet canonical = ellipsoid_vertices(spec.body_semi_axes, spec.body_vertex_count, spec.body_shell);
  PointSet canonical_f32;
  canonical_f32.reserve(canonical.size());
  for (const auto& v : canonical) canonical_f32.push_back(f32(v));

  std::vector<PointSet> vertices(static_cast<std::size_t>(t_count), canonical_f32);
  std::vector<Vec3> roots(static_cast<std::size_t>(t_count), f32(spec.root_offset));
  std::vector<Vec3> initial;
  initial.reserve(static_cast<std::size_t>(t_count));
  for (int t = 0; t < t_count; ++t) {
    Vec3 jitter = Vec3::Zero();
    if (spec.init_jitter_sigma > 0.0) {
      for (int c = 0; c < 3; ++c) jitter[c] = spec.init_jitter_sigma * normal(rng);
    }
    initial.push_back(f32(truth[static_cast<std::size_t>(t)] + spec.init_offset + jitter));
  }
  bundle.motion = make_motion_sequence(std::move(vertices), std::move(roots), std::move(initial));
  bundle.validate();
  out.truth_translations = std::move(truth);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void spec_fail(const std::string& field, const std::string& what) {
  throw ValidationError("synth spec: field '" + field + "' " + what);
}

double spec_number(const json& v, const std::string& name) {
  if (!v.is_number()) spec_fail(name, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) spec_fail(name, "must be finite");
  return d;
}

int spec_int(const json& v, const std::string& name) {
  if (!v.is_number_integer()) spec_fail(name, "must be an integer");
  const auto i = v.get<std::int64_t>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) spec_fail(name, "is out of range");
  return static_cast<int>(i);
}

Vec3 spec_vec3(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 3) spec_fail(name, "must be an array of 3 numbers");
  return {spec_number(v[0], name), spec_number(v[1], name), spec_number(v[2], name)};
}

Eigen::Vector2d spec_vec2(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 2) spec_fail(name, "must be an array of 2 numbers");
  return {spec_number(v[0], name), spec_number(v[1], name)};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

}  // namespace

SynthSpec synth_spec_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synth spec: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("synth spec: expected a JSON object");

  SynthSpec spec;
  for (const auto& [key, v] : doc.items()) {
    if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        spec_fail(key, "must be a nonnegative integer");
      }
      spec.seed = v.get<std::uint64_t>();
    } else if (key == "frames") {
      spec.frames = spec_int(v, key);
    } else if (key == "width") {
      spec.width = spec_int(v, key);
    } else if (key == "height") {
      spec.height = spec_int(v, key);
    } else if (key == "intrinsics") {
      if (!v.is_object()) spec_fail(key, "must be an object {fx, fy, cx, cy}");
      for (const auto& [ik, iv] : v.items()) {
        const std::string name = "intrinsics." + ik;
        if (ik == "fx") spec.intrinsics.fx = spec_number(iv, name);
        else if (ik == "fy") spec.intrinsics.fy = spec_number(iv, name);
        else if (ik == "cx") spec.intrinsics.cx = spec_number(iv, name);
        else if (ik == "cy") spec.intrinsics.cy = spec_number(iv, name);
        else spec_fail(name, "is not a known field");
      }
    } else if (key == "floor_y") {
      spec.floor_y = spec_number(v, key);
    } else if (key == "floor_color") {
      spec.floor_color = spec_vec3(v, key);
    } else if (key == "back_wall_z") {
      spec.back_wall_z = spec_number(v, key);
    } else if (key == "wall_color") {
      spec.wall_color = spec_vec3(v, key);
    } else if (key == "boxes") {
      if (!v.is_array()) spec_fail(key, "must be an array");
      spec.boxes.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string name = "boxes[" + std::to_string(i) + "]";
        if (!v[i].is_object()) spec_fail(name, "must be an object {min, max, color}");
        SynthBox box;
        for (const auto& [bk, bv] : v[i].items()) {
          if (bk == "min") box.min = spec_vec3(bv, name + ".min");
          else if (bk == "max") box.max = spec_vec3(bv, name + ".max");
          else if (bk == "color") box.color = spec_vec3(bv, name + ".color");
          else spec_fail(name + "." + bk, "is not a known field");
        }
        spec.boxes.push_back(box);
      }
    } else if (key == "body_semi_axes") {
      spec.body_semi_axes = spec_vec3(v, key);
    } else if (key == "body_vertex_count") {
      spec.body_vertex_count = spec_int(v, key);
    } else if (key == "body_shell") {
      if (v == "front") spec.body_shell = BodyShell::kFront;
      else if (v == "full") spec.body_shell = BodyShell::kFull;
      else spec_fail(key, "must be \"front\" or \"full\"");
    } else if (key == "root_offset") {
      spec.root_offset = spec_vec3(v, key);
    } else if (key == "body_color") {
      spec.body_color = spec_vec3(v, key);
    } else if (key == "path_start") {
      spec.path_start = spec_vec2(v, key);
    } else if (key == "path_end") {
      spec.path_end = spec_vec2(v, key);
    } else if (key == "path_bulge") {
      spec.path_bulge = spec_number(v, key);
    } else if (key == "bob_amplitude") {
      spec.bob_amplitude = spec_number(v, key);
    } else if (key == "bob_cycles") {
      spec.bob_cycles = spec_number(v, key);
    } else if (key == "depth_noise_sigma") {
      spec.depth_noise_sigma = spec_number(v, key);
    } else if (key == "last_keyframe_depth_scale") {
      spec.last_keyframe_depth_scale = spec_number(v, key);
    } else if (key == "mask_erosion") {
      spec.mask_erosion = spec_int(v, key);
    } else if (key == "init_offset") {
      spec.init_offset = spec_vec3(v, key);
    } else if (key == "init_jitter_sigma") {
      spec.init_jitter_sigma = spec_number(v, key);
    } else if (key == "force_mask_overlap") {
      if (!v.is_boolean()) spec_fail(key, "must be a boolean");
      spec.force_mask_overlap = v.get<bool>();
    } else {
      spec_fail(key, "is not a known field");
    }
  }
  spec.validate();
  return spec;
}

std::string synth_spec_to_json(const SynthSpec& spec) {
  json boxes = json::array();
  for (const auto& b : spec.boxes) {
    boxes.push_back(json{{"min", to_json(b.min)}, {"max", to_json(b.max)}, {"color", to_json(b.color)}});
  }
  const json doc{
      {"seed", spec.seed},
      {"frames", spec.frames},
      {"width", spec.width},
      {"height", spec.height},
      {"intrinsics",
       {{"fx", spec.intrinsics.fx}, {"fy", spec.intrinsics.fy}, {"cx", spec.intrinsics.cx}, {"cy", spec.intrinsics.cy}}},
      {"floor_y", spec.floor_y},
      {"floor_color", to_json(spec.floor_color)},
      {"back_wall_z", spec.back_wall_z},
      {"wall_color", to_json(spec.wall_color)},
      {"boxes", boxes},
      {"body_semi_axes", to_json(spec.body_semi_axes)},
      {"body_vertex_count", spec.body_vertex_count},
      {"body_shell", spec.body_shell == BodyShell::kFront ? "front" : "full"},
      {"root_offset", to_json(spec.root_offset)},
      {"body_color", to_json(spec.body_color)},
      {"path_start", to_json(spec.path_start)},
      {"path_end", to_json(spec.path_end)},
      {"path_bulge", spec.path_bulge},
      {"bob_amplitude", spec.bob_amplitude},
      {"bob_cycles", spec.bob_cycles},
      {"depth_noise_sigma", spec.depth_noise_sigma},
      {"last_keyframe_depth_scale", spec.last_keyframe_depth_scale},
      {"mask_erosion", spec.mask_erosion},
      {"init_offset", to_json(spec.init_offset)},
      {"init_jitter_sigma", spec.init_jitter_sigma},
      {"force_mask_overlap", spec.force_mask_overlap},
  };
  return doc.dump(2) + "\n";
}

}  // namespace share
