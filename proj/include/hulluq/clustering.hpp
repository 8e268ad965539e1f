#pragma once

#include <span>
#include <vector>

#include "hulluq/geometry.hpp"

namespace hulluq {

/// DBSCAN parameters. Defaults reproduce the analysis protocol.
struct ClusterParams {
  double epsilon = 0.25;
  int min_samples = 3;
};

/// Per-point labels aligned with the input order. -1 is noise; clusters
/// are numbered 0..k-1 in order of first discovery.
struct ClusterLabeling {
  std::vector<int> labels;
  int cluster_count = 0;
};

/// Classic DBSCAN over Euclidean distance with an inclusive epsilon
/// boundary. A point counts in its own neighborhood. Border points
/// reachable from several clusters go to the cluster discovered first
/// in input-scan order. Neighborhood search is brute-force O(n^2).
ClusterLabeling dbscan(std::span<const Point2D> points, const ClusterParams& params);

}  // namespace hulluq
