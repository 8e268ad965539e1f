#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hulluq/clustering.hpp"
#include "hulluq/collector.hpp"
#include "hulluq/embedding.hpp"
#include "hulluq/geometry.hpp"

namespace hulluq {

struct ClusterArea {
  int label = 0;
  double area = 0.0;
};

/// Scored instance: total hull area over non-noise clusters plus the
/// provenance needed to redraw the scatter and contour figures.
struct UncertaintyRecord {
  std::string instance_id;
  double temperature = 0.0;
  std::vector<ClusterArea> cluster_areas;  // ascending label
  int noise_count = 0;
  double total_area = 0.0;
  std::vector<Point2D> points;
  ClusterLabeling labels;
};

/// Statistics over total_area values at one temperature. cumulative_means[p]
/// is the mean of the ceil(p% * N) smallest values. std uses the n-1
/// divisor (0 for a single value).
struct StatsSummary {
  double temperature = 0.0;
  double mean = 0.0, std = 0.0, min = 0.0, max = 0.0;
  std::map<int, double> cumulative_means;  // p in {10, 25, 50, 75, 90}
};

/// Cluster the given 2D points and sum hull areas over non-noise
/// clusters (clusters with < 3 points contribute 0).
UncertaintyRecord score_points(const std::vector<Point2D>& points,
                               const ClusterParams& params);

/// Full per-instance pipeline: embed -> fit PCA on this instance's
/// responses -> project -> cluster -> sum hull areas.
UncertaintyRecord score_instance(const ResponseSet& responses, EmbedderBackend& backend,
                                 const ClusterParams& params,
                                 EmbeddingCache* cache = nullptr);

StatsSummary summarize(const std::vector<UncertaintyRecord>& records,
                       double temperature);

struct Histogram {
  std::vector<double> edges;  // bins+1 ascending
  std::vector<long> counts;   // bins entries
};

/// Equal-width bins over [0, max(values)]; counts sum to N.
Histogram histogram(const std::vector<double>& values, int bins);

struct ContourMap {
  int grid = 0;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  std::vector<double> density;            // grid*grid, row-major by y
  std::vector<std::vector<Point2D>> hulls;  // one ring per non-noise cluster
  std::vector<Point2D> points;
};

/// Gaussian kernel density estimate of the record's points on a
/// grid x grid lattice over the padded bounding box (Scott's-rule
/// bandwidth with a 1e-6 floor), plus per-cluster hull outlines.
ContourMap contour_map(const UncertaintyRecord& record, int grid);

struct LemmaReport {
  bool spread_monotonic = false;    // median area grows with cloud sigma
  bool scale_law_holds = false;     // k^2 area scaling per seed
  bool additive = false;            // total equals sum of per-cluster hulls
  bool noise_invariant = false;     // far singleton leaves the total unchanged
  bool temperature_monotonic = false;  // mock sweep means strictly increase
  std::vector<double> sigma_medians;
  std::vector<double> temperature_means;
  std::string detail;
};

struct LemmaSuiteConfig {
  std::vector<double> sigmas{0.05, 0.1, 0.2, 0.4};
  int seeds_per_sigma = 100;
  int points_per_cloud = 30;
  std::vector<double> temperatures{std::begin(kDefaultTemperatures),
                                   std::end(kDefaultTemperatures)};
  int sweep_instances = 20;
  int sweep_samples = 30;
  std::uint64_t seed = 1;
  ClusterParams params{};
};

/// Executable form of the diversity and additivity claims plus the
/// temperature-sensitivity sweep. Failures are reported, not thrown.
LemmaReport lemma_suite(const LemmaSuiteConfig& config);

// --- artifact writers ---------------------------------------------------

void write_uncertainty_csv(const std::vector<UncertaintyRecord>& records,
                           const std::filesystem::path& path);
/// Table layout: rows = Mean/Std/Min/Max/10%/25%/50%/75%/90%,
/// columns = temperatures ascending.
void write_stats_csv(const std::vector<StatsSummary>& summaries,
                     const std::filesystem::path& path);
void write_histogram_csv(const Histogram& hist, const std::filesystem::path& path);
void write_histogram_svg(const Histogram& hist, const std::string& title,
                         const std::filesystem::path& path);
void write_contour_csv(const ContourMap& map, const std::filesystem::path& path);
/// SVG with the density field, point markers, and dashed hull outlines.
void write_contour_svg(const ContourMap& map, const std::string& title,
                       const std::filesystem::path& path);

/// Shortest-round-trip-ish decimal formatting used by every CSV writer.
std::string format_double(double v);

}  // namespace hulluq
