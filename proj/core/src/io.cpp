#include "share/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "share/error.hpp"

namespace share {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor I/O assumes a little-endian host");

constexpr const char* kManifestName = "manifest.json";

std::string join_shape(const std::vector<std::int64_t>& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t element_count(const std::vector<std::int64_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

// Typed manifest accessors that report the offending field.
const json& field(const json& object, const std::string& key, const std::string& where) {
  if (!object.is_object()) fail(where, "expected a JSON object");
  auto it = object.find(key);
  if (it == object.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

std::int64_t int_field(const json& object, const std::string& key, const std::string& where) {
  const json& v = field(object, key, where);
  if (!v.is_number_integer()) fail(where, "field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string string_field(const json& object, const std::string& key, const std::string& where) {
  const json& v = field(object, key, where);
  if (!v.is_string()) fail(where, "field '" + key + "' must be a string");
  return v.get<std::string>();
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, "value is not finite");
  return d;
}

Vec3 vec3_from_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected an [x, y, z] array");
  return {number(v[0], where), number(v[1], where), number(v[2], where)};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::vector<Vec3> vec3_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of [x, y, z] triples");
  std::vector<Vec3> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(vec3_from_json(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// raw tensors

struct TensorRef {
  std::string file;
  std::string dtype;
  std::vector<std::int64_t> shape;
};

json tensor_entry(const TensorRef& ref) {
  return json{{"file", ref.file},
              {"dtype", ref.dtype},
              {"shape", ref.shape},
              {"byte_order", "little"}};
}

class TensorReader {
 public:
  explicit TensorReader(fs::path directory, const json& files)
      : directory_(std::move(directory)), files_(files) {}

  std::vector<float> float32(const std::string& name, const std::vector<std::int64_t>& shape) const {
    const std::string bytes = load(name, "float32", shape, sizeof(float));
    std::vector<float> out(element_count(shape));
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
  }

  std::vector<std::uint8_t> uint8(const std::string& name, const std::vector<std::int64_t>& shape) const {
    const std::string bytes = load(name, "uint8", shape, 1);
    return {bytes.begin(), bytes.end()};
  }

  std::string file_of(const std::string& name) const {
    return string_field(field(files_, name, "manifest.json: files"), "file",
                        "manifest.json: files." + name);
  }

 private:
  std::string load(const std::string& name, const std::string& dtype,
                   const std::vector<std::int64_t>& shape, std::size_t element_size) const {
    const std::string where = "manifest.json: files." + name;
    const json& entry = field(files_, name, "manifest.json: files");
    const std::string file = string_field(entry, "file", where);
    if (file.empty() || fs::path(file).has_parent_path() || file == "." || file == "..") {
      fail(where, "file name '" + file + "' must be a plain file name inside the bundle");
    }
    const std::string declared_dtype = string_field(entry, "dtype", where);
    if (declared_dtype != dtype) fail(where, "dtype '" + declared_dtype + "' but expected '" + dtype + "'");
    if (entry.contains("byte_order") && entry["byte_order"] != "little") {
      fail(where, "byte_order must be 'little'");
    }
    const json& shape_json = field(entry, "shape", where);
    if (!shape_json.is_array()) fail(where, "field 'shape' must be an array");
    std::vector<std::int64_t> declared;
    for (const auto& d : shape_json) {
      if (!d.is_number_integer()) fail(where, "field 'shape' must hold integers");
      declared.push_back(d.get<std::int64_t>());
    }
    if (declared != shape) {
      fail(where, "shape " + join_shape(declared) + " does not match manifest dimensions " +
                      join_shape(shape));
    }
    const std::string bytes = read_file(directory_ / file);
    const std::size_t expected = element_count(shape) * element_size;
    if (bytes.size() != expected) {
      std::ostringstream os;
      os << "shape mismatch in " << file << ": shape " << join_shape(shape) << " needs " << expected
         << " bytes but the file holds " << bytes.size();
      fail(where, os.str());
    }
    return bytes;
  }

  fs::path directory_;
  const json& files_;
};

template <typename T>
std::string to_bytes(const std::vector<T>& values) {
  std::string out(values.size() * sizeof(T), '\0');
  std::memcpy(out.data(), values.data(), out.size());
  return out;
}

void append_vec3(std::vector<float>& out, const Vec3& v) {
  out.push_back(static_cast<float>(v.x()));
  out.push_back(static_cast<float>(v.y()));
  out.push_back(static_cast<float>(v.z()));
}

Vec3 vec3_at(const std::vector<float>& data, std::size_t i) {
  return {data[3 * i], data[3 * i + 1], data[3 * i + 2]};
}

void require_finite(const std::vector<float>& data, const std::string& file, const std::string& name) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      fail(file, "field '" + name + "' has a non-finite value at element " + std::to_string(i));
    }
  }
}

const char* keyframe_tag(std::size_t k) { return k == 0 ? "first" : "last"; }

// ---------------------------------------------------------------------------
// JSON helpers for motion.json

json loss_to_json(const LossTerms& l) { return json::array({l.total, l.body, l.root}); }

LossTerms loss_from_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected a [total, body, root] triple");
  return {number(v[0], where), number(v[1], where), number(v[2], where)};
}

json config_to_json(const OptimizeConfig& c) {
  return json{{"iterations", c.iterations},       {"learning_rate", c.learning_rate},
              {"adam_beta1", c.beta1},            {"adam_beta2", c.beta2},
              {"adam_epsilon", c.epsilon},        {"gaussian_sigma", c.gaussian_sigma},
              {"vertex_stride", c.vertex_stride}, {"body_weight", c.body_weight},
              {"root_weight", c.root_weight}};
}

OptimizeConfig config_from_json(const json& v, const std::string& where) {
  OptimizeConfig c;
  c.iterations = static_cast<int>(int_field(v, "iterations", where));
  c.learning_rate = number(field(v, "learning_rate", where), where + ".learning_rate");
  c.beta1 = number(field(v, "adam_beta1", where), where + ".adam_beta1");
  c.beta2 = number(field(v, "adam_beta2", where), where + ".adam_beta2");
  c.epsilon = number(field(v, "adam_epsilon", where), where + ".adam_epsilon");
  c.gaussian_sigma = number(field(v, "gaussian_sigma", where), where + ".gaussian_sigma");
  c.vertex_stride = static_cast<int>(int_field(v, "vertex_stride", where));
  c.body_weight = number(field(v, "body_weight", where), where + ".body_weight");
  c.root_weight = number(field(v, "root_weight", where), where + ".root_weight");
  return c;
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(where, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// files

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path.string() + ": read failed");
  return bytes;
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open file for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError(path.string() + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError(path.string() + ": rename failed: " + ec.message());
  }
}

void StagedOutputs::add(std::string file_name, std::string bytes) {
  files_.emplace_back(std::move(file_name), std::move(bytes));
}

void StagedOutputs::commit(const fs::path& directory) const {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError(directory.string() + ": cannot create directory: " + ec.message());

  std::vector<fs::path> staged;
  auto cleanup = [&] {
    for (const auto& p : staged) {
      std::error_code ignored;
      fs::remove(p, ignored);
    }
  };
  for (const auto& [name, bytes] : files_) {
    fs::path tmp = directory / (name + ".tmp");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      cleanup();
      throw IoError(tmp.string() + ": cannot open file for writing");
    }
    staged.push_back(tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      cleanup();
      throw IoError(tmp.string() + ": write failed");
    }
  }
  for (const auto& [name, bytes] : files_) {
    const fs::path target = directory / name;
    if (fs::exists(target, ec) && !fs::is_regular_file(target, ec)) {
      cleanup();
      throw IoError(target.string() + ": exists and is not a regular file");
    }
  }
  for (std::size_t i = 0; i < files_.size(); ++i) {
    fs::rename(staged[i], directory / files_[i].first, ec);
    if (ec) {
      cleanup();
      for (std::size_t j = 0; j < i; ++j) {
        std::error_code ignored;
        fs::remove(directory / files_[j].first, ignored);
      }
      throw IoError((directory / files_[i].first).string() + ": rename failed: " + ec.message());
    }
  }
}

// ---------------------------------------------------------------------------
// bundle

std::size_t InputBundle::vertex_count() const noexcept {
  return motion.frames.empty() ? 0 : motion.frames.front().canonical_vertices.size();
}

void InputBundle::validate() const {
  if (height < 1 || width < 1) throw ValidationError("bundle image dimensions must be positive");
  motion.validate();
  const std::size_t t = frame_count();
  if (masks.size() != t) {
    throw ValidationError("bundle has " + std::to_string(masks.size()) + " masks for " +
                          std::to_string(t) + " frames");
  }
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (!masks[i].same_shape(height, width)) {
      throw ValidationError("mask " + std::to_string(i) + " does not match the image size");
    }
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const DepthFrame& f = keyframe_depth[k];
    if (!f.depth.same_shape(height, width)) {
      throw ValidationError(std::string(keyframe_tag(k)) + " keyframe depth does not match the image size");
    }
    f.validate();
  }
  const std::size_t v = vertex_count();
  for (std::size_t i = 0; i < t; ++i) {
    if (motion.frames[i].canonical_vertices.size() != v) {
      throw ValidationError("frame " + std::to_string(i) + " has a different vertex count");
    }
  }
}

InputBundle load_bundle(const fs::path& directory) {
  const fs::path manifest_path = directory / kManifestName;
  const std::string text = read_file(manifest_path);
  const std::string where = kManifestName;
  try {
    const json manifest = parse_json(text, where);
    const std::int64_t version = int_field(manifest, "version", where);
    if (version != kManifestVersion) {
      fail(where, "unsupported manifest version " + std::to_string(version));
    }
    const std::int64_t t = int_field(manifest, "T", where);
    const std::int64_t h = int_field(manifest, "h", where);
    const std::int64_t w = int_field(manifest, "w", where);
    const std::int64_t v = int_field(manifest, "V", where);
    if (t < 2) fail(where, "field 'T' must be >= 2");
    if (h < 1 || w < 1) fail(where, "fields 'h' and 'w' must be >= 1");
    if (v < 1) fail(where, "field 'V' must be >= 1");
    constexpr std::int64_t kLimit = std::int64_t{1} << 31;
    if (t >= kLimit || h >= kLimit || w >= kLimit || v >= kLimit || h * w >= kLimit) {
      fail(where, "dimensions are too large");
    }

    const json& keyframes = field(manifest, "keyframes", where);
    if (!keyframes.is_array() || keyframes.size() != 2 || !keyframes[0].is_number_integer() ||
        !keyframes[1].is_number_integer() || keyframes[0].get<std::int64_t>() != 0 ||
        keyframes[1].get<std::int64_t>() != t - 1) {
      fail(where, "field 'keyframes' must be [0, T-1]");
    }

    const json& files = field(manifest, "files", where);
    const TensorReader reader(directory, files);
    const json& intrinsics = field(manifest, "intrinsics", where);

    InputBundle bundle;
    bundle.height = static_cast<int>(h);
    bundle.width = static_cast<int>(w);
    const int hi = bundle.height;
    const int wi = bundle.width;

    for (std::size_t k = 0; k < 2; ++k) {
      const std::string tag = keyframe_tag(k);
      const std::string k_where = where + ": intrinsics." + tag;
      const json& matrix = field(intrinsics, tag, where + ": intrinsics");
      if (!matrix.is_array() || matrix.size() != 9) fail(k_where, "expected 9 row-major numbers");
      std::array<double, 9> values{};
      for (std::size_t i = 0; i < 9; ++i) values[i] = number(matrix[i], k_where);
      DepthFrame& frame = bundle.keyframe_depth[k];
      try {
        frame.intrinsics = CameraIntrinsics::from_matrix(values);
      } catch (const ValidationError& e) {
        fail(k_where, e.what());
      }

      const std::vector<float> depth = reader.float32(tag + "_depth", {h, w});
      const std::vector<std::uint8_t> valid = reader.uint8(tag + "_valid", {h, w});
      const std::vector<float> rgb = reader.float32(tag + "_rgb", {h, w, 3});
      require_finite(rgb, reader.file_of(tag + "_rgb"), tag + "_rgb");

      frame.depth = Grid<double>(hi, wi);
      frame.valid = Mask(hi, wi);
      frame.rgb = Grid<Vec3>(hi, wi, Vec3::Zero());
      for (int r = 0; r < hi; ++r) {
        for (int c = 0; c < wi; ++c) {
          const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(wi) +
                                static_cast<std::size_t>(c);
          frame.depth(r, c) = depth[i];
          frame.valid(r, c) = valid[i];
          frame.rgb(r, c) = vec3_at(rgb, i);
          if (valid[i] && !(std::isfinite(depth[i]) && depth[i] > 0.0f)) {
            fail(reader.file_of(tag + "_depth"),
                 "field '" + tag + "_depth' is not finite and positive at valid pixel (" +
                     std::to_string(r) + "," + std::to_string(c) + ")");
          }
        }
      }
    }

    const std::vector<std::uint8_t> masks = reader.uint8("masks", {t, h, w});
    const std::size_t plane = static_cast<std::size_t>(h * w);
    bundle.masks.reserve(static_cast<std::size_t>(t));
    for (std::int64_t f = 0; f < t; ++f) {
      HumanMask mask(hi, wi);
      std::copy_n(masks.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(f) * plane),
                  plane, mask.data().begin());
      bundle.masks.push_back(std::move(mask));
    }

    const std::vector<float> vertices = reader.float32("canonical_vertices", {t, v, 3});
    require_finite(vertices, reader.file_of("canonical_vertices"), "canonical_vertices");
    const std::vector<float> roots = reader.float32("canonical_roots", {t, 3});
    require_finite(roots, reader.file_of("canonical_roots"), "canonical_roots");
    const std::vector<float> translations = reader.float32("initial_translations", {t, 3});
    require_finite(translations, reader.file_of("initial_translations"), "initial_translations");

    std::vector<PointSet> canonical(static_cast<std::size_t>(t));
    std::vector<Vec3> root_list;
    std::vector<Vec3> translation_list;
    for (std::size_t f = 0; f < static_cast<std::size_t>(t); ++f) {
      canonical[f].reserve(static_cast<std::size_t>(v));
      for (std::size_t j = 0; j < static_cast<std::size_t>(v); ++j) {
        canonical[f].push_back(vec3_at(vertices, f * static_cast<std::size_t>(v) + j));
      }
      root_list.push_back(vec3_at(roots, f));
      translation_list.push_back(vec3_at(translations, f));
    }
    bundle.motion = make_motion_sequence(std::move(canonical), std::move(root_list),
                                         std::move(translation_list));
    bundle.validate();
    return bundle;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    // Anything not already classified (allocation, JSON type errors) still
    // surfaces as a structured load error.
    throw ValidationError(directory.string() + ": failed to load bundle: " + e.what());
  }
}

void stage_bundle(const InputBundle& bundle, StagedOutputs& outputs) {
  bundle.validate();
  const auto t = static_cast<std::int64_t>(bundle.frame_count());
  const std::int64_t h = bundle.height;
  const std::int64_t w = bundle.width;
  const auto v = static_cast<std::int64_t>(bundle.vertex_count());

  json files = json::object();
  json intrinsics = json::object();
  auto add_tensor = [&](const std::string& name, const std::string& dtype,
                        std::vector<std::int64_t> shape, std::string bytes) {
    const std::string file = name + (dtype == "uint8" ? ".u8" : ".f32");
    files[name] = tensor_entry({file, dtype, std::move(shape)});
    outputs.add(file, std::move(bytes));
  };

  for (std::size_t k = 0; k < 2; ++k) {
    const std::string tag = keyframe_tag(k);
    const DepthFrame& frame = bundle.keyframe_depth[k];
    intrinsics[tag] = frame.intrinsics.to_matrix();
    std::vector<float> depth;
    std::vector<std::uint8_t> valid;
    std::vector<float> rgb;
    for (int r = 0; r < frame.height(); ++r) {
      for (int c = 0; c < frame.width(); ++c) {
        depth.push_back(static_cast<float>(frame.depth(r, c)));
        valid.push_back(frame.valid(r, c));
        append_vec3(rgb, frame.rgb(r, c));
      }
    }
    add_tensor(tag + "_depth", "float32", {h, w}, to_bytes(depth));
    add_tensor(tag + "_valid", "uint8", {h, w}, to_bytes(valid));
    add_tensor(tag + "_rgb", "float32", {h, w, 3}, to_bytes(rgb));
  }

  std::vector<std::uint8_t> masks;
  for (const auto& m : bundle.masks) masks.insert(masks.end(), m.data().begin(), m.data().end());
  add_tensor("masks", "uint8", {t, h, w}, to_bytes(masks));

  std::vector<float> vertices;
  std::vector<float> roots;
  std::vector<float> translations;
  for (std::size_t f = 0; f < bundle.frame_count(); ++f) {
    const BodyFrame& body = bundle.motion.frames[f];
    for (const auto& p : body.canonical_vertices) append_vec3(vertices, p);
    append_vec3(roots, body.canonical_root);
    append_vec3(translations, bundle.motion.initial_translations[f]);
  }
  add_tensor("canonical_vertices", "float32", {t, v, 3}, to_bytes(vertices));
  add_tensor("canonical_roots", "float32", {t, 3}, to_bytes(roots));
  add_tensor("initial_translations", "float32", {t, 3}, to_bytes(translations));

  const json manifest{{"version", kManifestVersion},
                      {"T", t},
                      {"h", h},
                      {"w", w},
                      {"V", v},
                      {"keyframes", json::array({0, t - 1})},
                      {"intrinsics", intrinsics},
                      {"files", files}};
  outputs.add(kManifestName, manifest.dump(2) + "\n");
}

void write_bundle(const InputBundle& bundle, const fs::path& directory) {
  StagedOutputs outputs;
  stage_bundle(bundle, outputs);
  outputs.commit(directory);
}

// ---------------------------------------------------------------------------
// scene.ply

std::string encode_scene_ply(const PointMap& scene) {
  if (scene.empty()) throw ValidationError("refusing to write an empty scene point cloud");
  std::ostringstream header;
  header << "ply\n"
         << "format binary_little_endian 1.0\n"
         << "comment background scene point map (row-major pixel order)\n"
         << "element vertex " << scene.size() << "\n"
         << "property float x\n"
         << "property float y\n"
         << "property float z\n"
         << "property uchar red\n"
         << "property uchar green\n"
         << "property uchar blue\n"
         << "end_header\n";
  std::string out = header.str();
  const std::size_t payload_start = out.size();
  out.resize(payload_start + scene.size() * 15);
  char* cursor = out.data() + payload_start;
  for (const auto& p : scene.points()) {
    for (int c = 0; c < 3; ++c) {
      const float value = static_cast<float>(p.position[c]);
      std::memcpy(cursor, &value, sizeof(float));
      cursor += sizeof(float);
    }
    for (int c = 0; c < 3; ++c) {
      const double clamped = std::clamp(p.color[c], 0.0, 1.0);
      *cursor++ = static_cast<char>(static_cast<std::uint8_t>(std::lround(clamped * 255.0)));
    }
  }
  return out;
}

void write_scene_ply(const PointMap& scene, const fs::path& path) {
  write_file_atomic(path, encode_scene_ply(scene));
}

// ---------------------------------------------------------------------------
// motion.json

MotionRecord make_motion_record(const OptimizeReport& report, const MotionSequence& sequence,
                                const OptimizeConfig& config) {
  if (report.final_translations.size() != sequence.frame_count()) {
    throw ValidationError("optimization report does not match the sequence length");
  }
  MotionRecord record;
  record.keyframes = sequence.keyframes;
  record.translations = report.final_translations;
  record.loss_history = report.loss_history;
  record.final_loss = report.final_loss;
  record.iterations_run = report.iterations_run;
  record.config = config;
  return record;
}

std::string encode_motion_json(const MotionRecord& record) {
  json translations = json::array();
  for (const auto& p : record.translations) translations.push_back(vec3_to_json(p));
  json history = json::array();
  for (const auto& l : record.loss_history) history.push_back(loss_to_json(l));
  const json doc{{"version", kManifestVersion},
                 {"T", record.translations.size()},
                 {"keyframes", record.keyframes},
                 {"translations", translations},
                 {"iterations_run", record.iterations_run},
                 {"loss_history", history},
                 {"final_loss", loss_to_json(record.final_loss)},
                 {"config", config_to_json(record.config)}};
  return doc.dump(2) + "\n";
}

MotionRecord decode_motion_json(const std::string& text) {
  const std::string where = "motion.json";
  try {
    const json doc = parse_json(text, where);
    MotionRecord record;
    const std::int64_t t = int_field(doc, "T", where);
    record.translations = vec3_list(field(doc, "translations", where), where + ".translations");
    if (static_cast<std::int64_t>(record.translations.size()) != t) {
      fail(where, "field 'translations' does not hold T entries");
    }
    const json& keyframes = field(doc, "keyframes", where);
    if (!keyframes.is_array() || keyframes.size() != 2) fail(where, "field 'keyframes' must be a pair");
    record.keyframes = {keyframes[0].get<std::size_t>(), keyframes[1].get<std::size_t>()};
    record.iterations_run = static_cast<std::size_t>(int_field(doc, "iterations_run", where));
    const json& history = field(doc, "loss_history", where);
    if (!history.is_array()) fail(where, "field 'loss_history' must be an array");
    for (std::size_t i = 0; i < history.size(); ++i) {
      record.loss_history.push_back(loss_from_json(history[i], where + ".loss_history[" + std::to_string(i) + "]"));
    }
    if (record.loss_history.size() != record.iterations_run) {
      fail(where, "loss_history length does not match iterations_run");
    }
    record.final_loss = loss_from_json(field(doc, "final_loss", where), where + ".final_loss");
    record.config = config_from_json(field(doc, "config", where), where + ".config");
    return record;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

void write_motion_json(const OptimizeReport& report, const MotionSequence& sequence,
                       const OptimizeConfig& config, const fs::path& path) {
  write_file_atomic(path, encode_motion_json(make_motion_record(report, sequence, config)));
}

MotionRecord read_motion_json(const fs::path& path) { return decode_motion_json(read_file(path)); }

// ---------------------------------------------------------------------------
// report.json / truth.json

std::string encode_report_json(const RunReport& report) {
  const json doc{{"alpha", report.alpha},
                 {"scene_points", report.scene_points},
                 {"overlap_pixels", report.overlap_pixels},
                 {"human_points", report.human_points},
                 {"iterations_run", report.iterations_run},
                 {"initial_loss", loss_to_json(report.initial_loss)},
                 {"final_loss", loss_to_json(report.final_loss)}};
  return doc.dump(2) + "\n";
}

std::string encode_truth_json(const std::vector<Vec3>& translations) {
  json list = json::array();
  for (const auto& p : translations) list.push_back(vec3_to_json(p));
  const json doc{{"version", kManifestVersion}, {"T", translations.size()}, {"translations", list}};
  return doc.dump(2) + "\n";
}

std::vector<Vec3> read_truth_json(const fs::path& path) {
  const std::string where = path.filename().string();
  const json doc = parse_json(read_file(path), where);
  try {
    return vec3_list(field(doc, "translations", where), where + ".translations");
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

}  // namespace share
