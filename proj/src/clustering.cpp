#include "hulluq/clustering.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace hulluq {

namespace {

std::vector<std::size_t> neighbors_of(std::span<const Point2D> points,
                                      std::size_t i, double eps) {
  std::vector<std::size_t> out;
  const double eps2 = eps * eps;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double dx = points[i].x - points[j].x;
    const double dy = points[i].y - points[j].y;
    if (dx * dx + dy * dy <= eps2) out.push_back(j);
  }
  return out;
}

}  // namespace

ClusterLabeling dbscan(std::span<const Point2D> points, const ClusterParams& params) {
  if (params.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  if (params.min_samples < 1) throw std::invalid_argument("min_samples must be >= 1");
  for (const Point2D& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("non-finite coordinate");
    }
  }

  const std::size_t n = points.size();
  constexpr int kUnvisited = -2;
  ClusterLabeling result;
  result.labels.assign(n, kUnvisited);

  int next_cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (result.labels[i] != kUnvisited) continue;
    auto seeds = neighbors_of(points, i, params.epsilon);
    if (seeds.size() < static_cast<std::size_t>(params.min_samples)) {
      result.labels[i] = -1;  // may be claimed as a border point later
      continue;
    }
    const int cluster = next_cluster++;
    result.labels[i] = cluster;
    // Expand from every core point; seeds acts as a worklist.
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const std::size_t j = seeds[s];
      if (result.labels[j] == -1) result.labels[j] = cluster;  // border
      if (result.labels[j] != kUnvisited) continue;
      result.labels[j] = cluster;
      auto reach = neighbors_of(points, j, params.epsilon);
      if (reach.size() >= static_cast<std::size_t>(params.min_samples)) {
        seeds.insert(seeds.end(), reach.begin(), reach.end());
      }
    }
  }
  result.cluster_count = next_cluster;
  return result;
}

}  // namespace hulluq
