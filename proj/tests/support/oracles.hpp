#pragma once

// Test-only reference implementations. Each one follows the textbook
// definition directly and shares no code with the library path it checks.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "share/geometry.hpp"
#include "share/optimizer.hpp"

namespace share::testing {

inline std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n, double extent = 1.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng), u(rng));
  return out;
}

inline Vec3 random_vec(std::mt19937_64& rng, double extent = 1.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  return {u(rng), u(rng), u(rng)};
}

inline double sq_dist(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

/// Exhaustive nearest neighbor, lowest index on ties.
inline std::pair<std::size_t, double> linear_scan(const std::vector<Vec3>& points, const Vec3& q) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = sq_dist(q, points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return {best, best_d};
}

/// O(n m) symmetric squared Chamfer.
inline double brute_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double ab = 0.0;
  for (const auto& x : a) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& y : b) m = std::min(m, sq_dist(x, y));
    ab += m;
  }
  double ba = 0.0;
  for (const auto& y : b) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& x : a) m = std::min(m, sq_dist(x, y));
    ba += m;
  }
  return ab / static_cast<double>(a.size()) + ba / static_cast<double>(b.size());
}

inline std::vector<Vec3> shifted(const std::vector<Vec3>& points, const Vec3& t) {
  std::vector<Vec3> out;
  for (const auto& p : points) out.push_back(p + t);
  return out;
}

/// Smallest gap between best and second-best squared distance over all
/// queries of both Chamfer directions. A gap >= delta means the nearest
/// neighbor assignment cannot flip under perturbations much smaller than delta.
inline double assignment_margin(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto margin_of = [](const std::vector<Vec3>& queries, const std::vector<Vec3>& pool) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& q : queries) {
      double d1 = std::numeric_limits<double>::infinity();
      double d2 = d1;
      for (const auto& p : pool) {
        const double d = std::sqrt(sq_dist(q, p));
        if (d < d1) {
          d2 = d1;
          d1 = d;
        } else if (d < d2) {
          d2 = d;
        }
      }
      if (pool.size() > 1) worst = std::min(worst, d2 - d1);
    }
    return worst;
  };
  return std::min(margin_of(a, b), margin_of(b, a));
}

inline PointMap random_map(std::mt19937_64& rng, int h, int w, double keep_probability) {
  std::bernoulli_distribution keep(keep_probability);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ScenePoint> pts;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!keep(rng)) continue;
      pts.push_back({{r, c}, random_vec(rng, 4.0), Vec3(unit(rng), unit(rng), unit(rng))});
    }
  }
  return PointMap(h, w, pts);
}

/// Merge written as the union of separately built sets, one per case.
inline std::map<Pixel, ScenePoint> merge_oracle(const PointMap& s1, const PointMap& s2, const Mask& h1,
                                                const Mask& h2) {
  std::map<Pixel, ScenePoint> a;
  std::map<Pixel, ScenePoint> b;
  for (const auto& p : s1.points()) a[p.pixel] = p;
  for (const auto& p : s2.points()) b[p.pixel] = p;

  std::map<Pixel, ScenePoint> averaged, single, fill_from_first, fill_from_last;
  for (int r = 0; r < h1.height(); ++r) {
    for (int c = 0; c < h1.width(); ++c) {
      const Pixel px{r, c};
      const bool in1 = h1(r, c) != 0;
      const bool in2 = h2(r, c) != 0;
      const bool has1 = a.count(px) > 0;
      const bool has2 = b.count(px) > 0;
      if (!in1 && !in2 && has1 && has2) {
        averaged[px] = {px, (a[px].position + b[px].position) / 2.0, (a[px].color + b[px].color) / 2.0};
      }
      if (!in1 && !in2 && has1 != has2) single[px] = has1 ? a[px] : b[px];
      if (in2 && !in1 && has1) fill_from_first[px] = a[px];
      if (in1 && !in2 && has2) fill_from_last[px] = b[px];
    }
  }
  std::map<Pixel, ScenePoint> out;
  for (const auto* part : {&averaged, &single, &fill_from_first, &fill_from_last}) {
    for (const auto& [px, p] : *part) {
      if (out.count(px)) throw std::logic_error("merge oracle cases overlap");
      out[px] = p;
    }
  }
  return out;
}

/// Central differences of f: R^n -> R.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double eps) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = f(x);
    x[i] = saved - eps;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

inline std::vector<double> flatten(const std::vector<Vec3>& v) {
  std::vector<double> out;
  for (const auto& p : v) {
    out.push_back(p[0]);
    out.push_back(p[1]);
    out.push_back(p[2]);
  }
  return out;
}

inline std::vector<Vec3> unflatten(const std::vector<double>& x) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i + 2 < x.size(); i += 3) out.emplace_back(x[i], x[i + 1], x[i + 2]);
  return out;
}

/// Direct Gaussian filter: builds an explicitly mirrored copy of the signal,
/// convolves, and renormalizes the truncated kernel.
inline std::vector<Vec3> direct_gaussian(const std::vector<Vec3>& signal, double sigma) {
  const int n = static_cast<int>(signal.size());
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  // Mirror sequence a b c d -> ... d c b a | a b c d | d c b a ...
  auto sample = [&](int i) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i - 1;
      if (i >= n) i = 2 * n - i - 1;
    }
    return signal[static_cast<std::size_t>(i)];
  };
  double norm = 0.0;
  for (int k = -radius; k <= radius; ++k) norm += std::exp(-(k * k) / (2.0 * sigma * sigma));
  std::vector<Vec3> out;
  for (int t = 0; t < n; ++t) {
    Vec3 acc = Vec3::Zero();
    for (int k = -radius; k <= radius; ++k) {
      acc += (std::exp(-(k * k) / (2.0 * sigma * sigma)) / norm) * sample(t + k);
    }
    out.push_back(acc);
  }
  return out;
}

/// Relative root loss written straight from its definition, with explicit
/// index sets {0..T-1} minus the complementary keyframe.
inline double direct_root_loss(const std::vector<Vec3>& current, const std::vector<Vec3>& reference) {
  const std::size_t t_count = current.size();
  const std::size_t first = 0;
  const std::size_t last = t_count - 1;
  double total = 0.0;
  for (auto [k, k_prime] : {std::pair{first, last}, std::pair{last, first}}) {
    double sum = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
      if (t == k_prime) continue;
      const Vec3 d_init = reference[t] - reference[k];
      const Vec3 d = current[t] - current[k];
      for (int c = 0; c < 3; ++c) sum += (d_init[c] - d[c]) * (d_init[c] - d[c]);
    }
    total += sum;
  }
  return total / static_cast<double>(t_count - 1);
}

/// Minimal independent reader for binary little-endian PLY point clouds.
struct PlyVertex {
  float x, y, z;
  std::uint8_t r, g, b;
};

inline std::vector<PlyVertex> parse_binary_ply(const std::string& bytes) {
  const std::string end_marker = "end_header\n";
  const auto header_end = bytes.find(end_marker);
  if (bytes.rfind("ply\n", 0) != 0 || header_end == std::string::npos) {
    throw std::runtime_error("not a PLY file");
  }
  const std::string header = bytes.substr(0, header_end);
  if (header.find("format binary_little_endian 1.0") == std::string::npos) {
    throw std::runtime_error("not binary little endian");
  }
  std::size_t count = 0;
  std::vector<std::pair<std::string, std::string>> props;
  std::size_t pos = 0;
  while (pos < header.size()) {
    const auto eol = header.find('\n', pos);
    const std::string line = header.substr(pos, eol - pos);
    pos = eol == std::string::npos ? header.size() : eol + 1;
    if (line.rfind("element vertex ", 0) == 0) count = std::stoul(line.substr(15));
    if (line.rfind("property ", 0) == 0) {
      const auto sp = line.find(' ', 9);
      props.emplace_back(line.substr(9, sp - 9), line.substr(sp + 1));
    }
  }
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"float", "x"}, {"float", "y"}, {"float", "z"}, {"uchar", "red"}, {"uchar", "green"}, {"uchar", "blue"}};
  if (props != expected) throw std::runtime_error("unexpected vertex layout");
  const std::size_t start = header_end + end_marker.size();
  if (bytes.size() - start != count * 15) throw std::runtime_error("payload size mismatch");
  std::vector<PlyVertex> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const char* p = bytes.data() + start + i * 15;
    std::memcpy(&out[i].x, p, 4);
    std::memcpy(&out[i].y, p + 4, 4);
    std::memcpy(&out[i].z, p + 8, 4);
    out[i].r = static_cast<std::uint8_t>(p[12]);
    out[i].g = static_cast<std::uint8_t>(p[13]);
    out[i].b = static_cast<std::uint8_t>(p[14]);
  }
  return out;
}

}  // namespace share::testing
