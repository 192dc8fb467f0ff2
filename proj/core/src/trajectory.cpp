#include "share/trajectory.hpp"

#include <cmath>
#include <string>

#include "share/error.hpp"

namespace share {
namespace {

void require_valid(const RootTrajectory& trajectory, const char* what) {
  if (trajectory.size() < 2) {
    throw ValidationError(std::string(what) + ": trajectory needs at least two frames");
  }
  for (const auto& p : trajectory) {
    if (!p.allFinite()) throw ValidationError(std::string(what) + ": trajectory has non-finite positions");
  }
}

// Half-sample symmetric reflection into [0, n).
std::size_t reflect_index(long long i, long long n) {
  const long long period = 2 * n;
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

int gaussian_radius(double sigma) {
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw ValidationError("gaussian sigma must be finite and positive");
  }
  return static_cast<int>(std::ceil(4.0 * sigma));
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = gaussian_radius(sigma);
  std::vector<double> weights(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * (k * k) / (sigma * sigma));
    weights[static_cast<std::size_t>(k + radius)] = w;
    total += w;
  }
  for (auto& w : weights) w /= total;
  return weights;
}

RootTrajectory gaussian_smooth(const RootTrajectory& trajectory, double sigma) {
  const std::vector<double> weights = gaussian_kernel(sigma);
  const int radius = static_cast<int>(weights.size() / 2);
  const auto n = static_cast<long long>(trajectory.size());
  RootTrajectory out(trajectory.size(), Vec3::Zero());
  for (long long t = 0; t < n; ++t) {
    Vec3 acc = Vec3::Zero();
    for (int k = -radius; k <= radius; ++k) {
      acc += weights[static_cast<std::size_t>(k + radius)] * trajectory[reflect_index(t + k, n)];
    }
    out[static_cast<std::size_t>(t)] = acc;
  }
  return out;
}

RelativeRootVectors relative_vectors(const RootTrajectory& trajectory, std::size_t anchor,
                                     std::size_t excluded) {
  require_valid(trajectory, "relative_vectors");
  const std::size_t last = trajectory.size() - 1;
  if (anchor == excluded) throw ValidationError("relative_vectors: anchor and excluded frame must differ");
  if (!((anchor == 0 && excluded == last) || (anchor == last && excluded == 0))) {
    throw ValidationError("relative_vectors: anchor and excluded frame must be the first and last frames");
  }
  RelativeRootVectors out;
  out.anchor = anchor;
  out.excluded = excluded;
  out.frames.reserve(last);
  out.vectors.reserve(last);
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    if (t == excluded) continue;
    out.frames.push_back(t);
    out.vectors.push_back(t == anchor ? Vec3::Zero().eval() : (trajectory[t] - trajectory[anchor]).eval());
  }
  return out;
}

RootLoss root_loss(const RootTrajectory& current, const RootTrajectory& smoothed_initial) {
  if (current.size() != smoothed_initial.size()) {
    throw ValidationError("root_loss: trajectory lengths differ (" + std::to_string(current.size()) +
                          " vs " + std::to_string(smoothed_initial.size()) + ")");
  }
  require_valid(current, "root_loss");
  require_valid(smoothed_initial, "root_loss");

  const std::size_t last = current.size() - 1;
  const double scale = 1.0 / static_cast<double>(last);
  RootLoss out;
  out.gradients.assign(current.size(), Vec3::Zero());

  const std::size_t anchors[2][2] = {{0, last}, {last, 0}};
  for (const auto& pair : anchors) {
    const RelativeRootVectors d = relative_vectors(current, pair[0], pair[1]);
    const RelativeRootVectors d_init = relative_vectors(smoothed_initial, pair[0], pair[1]);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.vectors.size(); ++i) {
      const Vec3 diff = d.vectors[i] - d_init.vectors[i];
      sum += diff.squaredNorm();
      const Vec3 g = (2.0 * scale) * diff;
      out.gradients[d.frames[i]] += g;
      out.gradients[d.anchor] -= g;
    }
    out.loss += scale * sum;
  }
  return out;
}

}  // namespace share
