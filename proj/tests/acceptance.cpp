// Acceptance gate: one line per criterion, nonzero exit when anything
// fails. Every check runs the shipped library against the independent
// reference implementations in oracles.hpp or against pinned fixtures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hulluq/analysis.hpp"
#include "hulluq/cli.hpp"
#include "hulluq/geometry.hpp"
#include "hulluq/projection.hpp"
#include "hulluq/rng.hpp"
#include "oracles.hpp"

using namespace hulluq;

namespace {

int failures = 0;

void run(const char* name, const std::function<bool(std::string&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %-34s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", name, seconds,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

std::vector<Point2D> random_points(std::uint64_t& state, int n, double scale = 1.0) {
  std::vector<Point2D> pts(n);
  for (Point2D& p : pts) {
    p.x = next_uniform(state) * scale;
    p.y = next_uniform(state) * scale;
  }
  return pts;
}

std::vector<Point2D> gaussian_cloud(std::uint64_t seed, int n, double sigma) {
  std::uint64_t state = splitmix64(seed);
  std::vector<Point2D> pts(n);
  for (Point2D& p : pts) {
    p.x = sigma * next_normal(state);
    p.y = sigma * next_normal(state);
  }
  return pts;
}

bool same_vertex_set(std::vector<Point2D> a, std::vector<Point2D> b) {
  auto lex = [](const Point2D& p, const Point2D& q) {
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  };
  std::sort(a.begin(), a.end(), lex);
  std::sort(b.begin(), b.end(), lex);
  return a == b;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hulluq_accept_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Criterion 1: 1000 random point sets, hull vertices exact and area
// within 1e-9 of the O(n^3) oracle.
bool hull_vs_oracle(std::string& detail) {
  std::uint64_t state = splitmix64(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + static_cast<int>(next_uniform(state) * 48);  // 3..50
    const auto pts = random_points(state, n);
    const HullPolygon hull = convex_hull(pts);
    if (!same_vertex_set(hull.vertices, oracle::hull_vertices(pts))) {
      detail = "vertex mismatch at trial " + std::to_string(trial);
      return false;
    }
    if (std::abs(hull.area - oracle::hull_area(pts)) > 1e-9) {
      detail = "area mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  return true;
}

// Criterion 2: 500 random sets, DBSCAN equals the density-reachability
// closure oracle (up to label renaming / ambiguous borders).
bool dbscan_vs_oracle(std::string& detail) {
  std::uint64_t state = splitmix64(202);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(next_uniform(state) * 200);  // 1..200
    const double scale = 0.5 + next_uniform(state) * 4.5;
    const auto pts = random_points(state, n, scale);
    ClusterParams params;
    params.epsilon = 0.1 + next_uniform(state) * 0.5;
    params.min_samples = 2 + static_cast<int>(next_uniform(state) * 5);
    const ClusterLabeling got = dbscan(pts, params);
    if (!oracle::labels_match(got.labels, oracle::dbscan_closure(pts, params))) {
      detail = "partition mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  return true;
}

// Criterion 3: 200 random matrices; components orthonormal to 1e-10,
// explained variances match the covariance eigensolver to 1e-8 (relative),
// and projected sample variance equals the explained variance.
bool pca_vs_oracle(std::string& detail) {
  std::uint64_t state = splitmix64(303);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + static_cast<int>(next_uniform(state) * 62);  // 3..64
    // Log-uniform dimension in [2, 1024] keeps the d x d oracle tractable
    // while still exercising the wide-matrix regime.
    int d = static_cast<int>(std::exp(std::log(2.0) +
                                      next_uniform(state) * std::log(512.0)));
    if (trial == 0) { n = 64; d = 1024; }
    EmbeddingMatrix m(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = next_normal(state);
    }
    const PcaModel model = fit_pca(m);
    if (std::abs(model.components.row(0).norm() - 1.0) > 1e-10 ||
        std::abs(model.components.row(1).norm() - 1.0) > 1e-10 ||
        std::abs(model.components.row(0).dot(model.components.row(1))) > 1e-10) {
      detail = "non-orthonormal components at trial " + std::to_string(trial);
      return false;
    }
    double expect[2];
    oracle::covariance_eig_top2(m, expect);
    for (int c = 0; c < 2; ++c) {
      const double tol = 1e-8 * std::max(1.0, std::abs(expect[c]));
      if (std::abs(model.explained_variance[c] - expect[c]) > tol) {
        detail = "eigenvalue mismatch at trial " + std::to_string(trial);
        return false;
      }
    }
    const auto pts = project(model, m);
    double mx = 0, my = 0;
    for (const Point2D& p : pts) { mx += p.x; my += p.y; }
    mx /= n; my /= n;
    double vx = 0, vy = 0;
    for (const Point2D& p : pts) {
      vx += (p.x - mx) * (p.x - mx);
      vy += (p.y - my) * (p.y - my);
    }
    vx /= n - 1; vy /= n - 1;
    if (std::abs(vx - model.explained_variance[0]) >
            1e-8 * std::max(1.0, vx) ||
        std::abs(vy - model.explained_variance[1]) >
            1e-8 * std::max(1.0, vy)) {
      detail = "projected variance mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  return true;
}

// Criterion 4: 30 verbatim-identical responses score exactly zero.
bool identical_responses_zero(std::string&) {
  ResponseSet set;
  set.instance_id = "identical";
  set.temperature = 0.001;
  for (int i = 0; i < 30; ++i) {
    set.responses.push_back({"no acute cardiopulmonary abnormality", "identical", i});
  }
  LocalHashEmbedder backend(256);
  const UncertaintyRecord record = score_instance(set, backend, {0.25, 3});
  return record.total_area == 0.0;
}

// Criterion 5: median area over 100 seeded clouds grows strictly with the
// cloud sigma, and scaling points and epsilon by k multiplies the area by
// exactly k^2 (relative 1e-9) on every seed.
bool spread_and_scale(std::string& detail) {
  const std::vector<double> sigmas{0.05, 0.1, 0.2, 0.4};
  std::vector<double> medians;
  for (double sigma : sigmas) {
    std::vector<double> areas;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto pts = gaussian_cloud(seed * 1000 + 7, 30, sigma);
      areas.push_back(score_points(pts, {0.25, 3}).total_area);
    }
    medians.push_back(median(areas));
  }
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (!(medians[i] > medians[i - 1])) {
      detail = "medians not strictly increasing";
      return false;
    }
  }

  const double k = 3.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto pts = gaussian_cloud(seed * 1000 + 7, 30, 0.1);
    std::vector<Point2D> scaled = pts;
    for (Point2D& p : scaled) { p.x *= k; p.y *= k; }
    const double base = score_points(pts, {0.25, 3}).total_area;
    const double grown = score_points(scaled, {0.25 * k, 3}).total_area;
    if (std::abs(grown - k * k * base) > 1e-9 * std::max(1.0, k * k * base)) {
      detail = "k^2 law violated at seed " + std::to_string(seed);
      return false;
    }
  }
  return true;
}

// Criterion 6: the total is exactly the sum of per-cluster hull areas on a
// three-blob fixture, and a far noise singleton leaves it unchanged.
bool additivity_and_noise(std::string& detail) {
  std::vector<Point2D> pts;
  const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  std::uint64_t state = splitmix64(606);
  for (const auto& c : centers) {
    for (int i = 0; i < 6; ++i) {
      pts.push_back({c[0] + 0.05 * next_normal(state),
                     c[1] + 0.05 * next_normal(state)});
    }
  }
  const UncertaintyRecord record = score_points(pts, {0.25, 3});
  if (record.cluster_areas.size() != 3) {
    detail = "expected 3 clusters, got " + std::to_string(record.cluster_areas.size());
    return false;
  }
  double sum = 0.0;
  for (const ClusterArea& ca : record.cluster_areas) sum += ca.area;
  if (record.total_area != sum) {
    detail = "total differs from the per-cluster sum";
    return false;
  }
  std::vector<Point2D> with_noise = pts;
  with_noise.push_back({100.0, 100.0});
  const UncertaintyRecord noisy = score_points(with_noise, {0.25, 3});
  if (noisy.total_area != record.total_area || noisy.noise_count != 1) {
    detail = "noise singleton changed the total";
    return false;
  }
  return true;
}

// Criterion 7: mean total area is strictly increasing across the five
// default temperatures on at least 19 of 20 seeded end-to-end mock sweeps
// (50 instances x 30 samples each).
bool temperature_monotonic(std::string& detail) {
  LocalHashEmbedder embedder(256);
  MockGenerator generator;
  int monotone = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    std::vector<double> means;
    for (double t : kDefaultTemperatures) {
      double total = 0.0;
      for (int inst = 0; inst < 50; ++inst) {
        ResponseSet set;
        set.instance_id = "sweep-" + std::to_string(inst);
        set.temperature = t;
        for (int s = 0; s < 30; ++s) {
          const std::uint64_t seed =
              derive_seed(900 + rep, set.instance_id, t, s);
          set.responses.push_back(
              {generator.generate(kDefaultPrompt, "", t, seed), set.instance_id, s});
        }
        total += score_instance(set, embedder, {0.25, 3}).total_area;
      }
      means.push_back(total / 50.0);
    }
    bool increasing = true;
    for (std::size_t i = 1; i < means.size(); ++i) {
      if (!(means[i] > means[i - 1])) increasing = false;
    }
    if (increasing) ++monotone;
  }
  detail = std::to_string(monotone) + "/20 sweeps monotone";
  return monotone >= 19;
}

// Criterion 8: summary statistics reproduce a pinned fixture to 1e-12 and
// every cumulative-mean row is nondecreasing in the percentile.
bool stats_fixture(std::string& detail) {
  const std::vector<double> values{0.12, 0.0,  0.31, 0.07, 0.55, 0.23, 0.0,
                                   0.44, 0.18, 0.09, 0.36, 0.27, 0.02, 0.5,
                                   0.15, 0.4,  0.06, 0.33, 0.21, 0.11};
  std::vector<UncertaintyRecord> records;
  for (std::size_t i = 0; i < values.size(); ++i) {
    UncertaintyRecord r;
    r.instance_id = "f" + std::to_string(i);
    r.temperature = 0.5;
    r.total_area = values[i];
    records.push_back(r);
  }
  const StatsSummary s = summarize(records, 0.5);
  const struct { double got, want; } checks[] = {
      {s.mean, 0.22000000000000003},
      {s.std, 0.16874147151938174},
      {s.min, 0.0},
      {s.max, 0.55},
      {s.cumulative_means.at(10), 0.0},
      {s.cumulative_means.at(25), 0.030000000000000006},
      {s.cumulative_means.at(50), 0.08},
      {s.cumulative_means.at(75), 0.14333333333333334},
      {s.cumulative_means.at(90), 0.18611111111111109},
  };
  for (const auto& c : checks) {
    if (std::abs(c.got - c.want) > 1e-12) {
      detail = "statistic off: got " + format_double(c.got) + ", want " +
               format_double(c.want);
      return false;
    }
  }
  double prev = -1.0;
  for (const auto& [p, m] : s.cumulative_means) {
    if (m < prev) {
      detail = "cumulative means not nondecreasing";
      return false;
    }
    prev = m;
  }
  return true;
}

// Criterion 9: two complete collect+analyze runs with the same seed write
// byte-identical uncertainty.csv and stats.csv.
bool end_to_end_determinism(std::string& detail) {
  std::string csv[2][2];
  for (int run = 0; run < 2; ++run) {
    const auto out = fresh_dir("determinism_" + std::to_string(run));
    RunConfig config;
    config.out_dir = out.string();
    config.seed = 424242;
    config.mock_instances = 4;
    config.samples_per_setting = 30;
    std::ostringstream log;
    if (cmd_collect(config, log) != kExitOk || cmd_analyze(config, log) != kExitOk) {
      detail = "pipeline run " + std::to_string(run) + " failed";
      return false;
    }
    csv[run][0] = slurp(out / "uncertainty.csv");
    csv[run][1] = slurp(out / "stats.csv");
  }
  if (csv[0][0].empty() || csv[0][0] != csv[1][0]) {
    detail = "uncertainty.csv differs between runs";
    return false;
  }
  if (csv[0][1].empty() || csv[0][1] != csv[1][1]) {
    detail = "stats.csv differs between runs";
    return false;
  }
  return true;
}

// Criterion 10: histogram counts are conserved and the KDE contour density
// integrates to 1 within 2%.
bool artifact_sanity(std::string& detail) {
  std::uint64_t state = splitmix64(1010);
  std::vector<double> values;
  for (int i = 0; i < 500; ++i) values.push_back(next_uniform(state) * 0.4);
  const Histogram hist = histogram(values, 30);
  long total = 0;
  for (long c : hist.counts) total += c;
  if (total != 500) {
    detail = "histogram lost mass: " + std::to_string(total) + "/500";
    return false;
  }

  UncertaintyRecord record;
  record.points = gaussian_cloud(31337, 40, 0.3);
  record.labels = dbscan(record.points, {0.25, 3});
  const ContourMap map = contour_map(record, 96);
  const double dx = (map.x1 - map.x0) / map.grid;
  const double dy = (map.y1 - map.y0) / map.grid;
  double integral = 0.0;
  for (double d : map.density) integral += d * dx * dy;
  if (std::abs(integral - 1.0) > 0.02) {
    detail = "density integral " + format_double(integral);
    return false;
  }
  return true;
}

}  // namespace

int main() {
  run("hull vs brute-force oracle", hull_vs_oracle);
  run("dbscan vs closure oracle", dbscan_vs_oracle);
  run("pca vs eigensolver oracle", pca_vs_oracle);
  run("identical responses -> zero", identical_responses_zero);
  run("spread monotonic + k^2 law", spread_and_scale);
  run("additivity + noise invariance", additivity_and_noise);
  run("temperature monotonicity", temperature_monotonic);
  run("pinned statistics fixture", stats_fixture);
  run("end-to-end determinism", end_to_end_determinism);
  run("histogram + density sanity", artifact_sanity);
  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
