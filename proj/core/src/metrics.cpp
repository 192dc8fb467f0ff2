#include "share/metrics.hpp"

#include <cmath>
#include <string>

#include "share/error.hpp"

namespace share {
namespace {

ErrorStats summarize(const std::vector<double>& values) {
  ErrorStats out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

std::vector<double> root_errors(std::span<const Vec3> predicted, std::span<const Vec3> truth) {
  if (predicted.size() != truth.size()) {
    throw ValidationError("mrpe: predicted has " + std::to_string(predicted.size()) +
                          " frames but truth has " + std::to_string(truth.size()));
  }
  if (predicted.empty()) throw ValidationError("mrpe: no frames");
  std::vector<double> errors;
  errors.reserve(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) errors.push_back((predicted[i] - truth[i]).norm());
  return errors;
}

std::vector<double> frame_vertex_errors(std::span<const PointSet> predicted,
                                        std::span<const PointSet> truth, double* total,
                                        std::size_t* count) {
  if (predicted.size() != truth.size()) {
    throw ValidationError("v2v: predicted has " + std::to_string(predicted.size()) +
                          " frames but truth has " + std::to_string(truth.size()));
  }
  if (predicted.empty()) throw ValidationError("v2v: no frames");
  std::vector<double> per_frame;
  *total = 0.0;
  *count = 0;
  for (std::size_t f = 0; f < predicted.size(); ++f) {
    if (predicted[f].size() != truth[f].size() || predicted[f].empty()) {
      throw ValidationError("v2v: vertex count mismatch at frame " + std::to_string(f));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < predicted[f].size(); ++j) sum += (predicted[f][j] - truth[f][j]).norm();
    *total += sum;
    *count += predicted[f].size();
    per_frame.push_back(sum / static_cast<double>(predicted[f].size()));
  }
  return per_frame;
}

}  // namespace

double mrpe(std::span<const Vec3> predicted, std::span<const Vec3> truth) {
  return summarize(root_errors(predicted, truth)).mean;
}

ErrorStats mrpe_stats(std::span<const Vec3> predicted, std::span<const Vec3> truth) {
  return summarize(root_errors(predicted, truth));
}

double v2v(std::span<const PointSet> predicted, std::span<const PointSet> truth) {
  double total = 0.0;
  std::size_t count = 0;
  frame_vertex_errors(predicted, truth, &total, &count);
  return total / static_cast<double>(count);
}

ErrorStats v2v_stats(std::span<const PointSet> predicted, std::span<const PointSet> truth) {
  double total = 0.0;
  std::size_t count = 0;
  return summarize(frame_vertex_errors(predicted, truth, &total, &count));
}

}  // namespace share
