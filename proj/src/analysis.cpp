#include "hulluq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "hulluq/projection.hpp"
#include "hulluq/rng.hpp"

namespace hulluq {

std::string format_double(double v) {
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

UncertaintyRecord score_points(const std::vector<Point2D>& points,
                               const ClusterParams& params) {
  UncertaintyRecord record;
  record.points = points;
  record.labels = dbscan(points, params);

  for (int label : record.labels.labels) {
    if (label == -1) ++record.noise_count;
  }
  for (int c = 0; c < record.labels.cluster_count; ++c) {
    std::vector<Point2D> members;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (record.labels.labels[i] == c) members.push_back(points[i]);
    }
    const double area =
        members.size() < 3 ? 0.0
                           : convex_hull(std::span<const Point2D>(members)).area;
    record.cluster_areas.push_back({c, area});
  }
  // Summation order fixed by ascending label.
  record.total_area = 0.0;
  for (const ClusterArea& ca : record.cluster_areas) record.total_area += ca.area;
  return record;
}

UncertaintyRecord score_instance(const ResponseSet& responses,
                                 EmbedderBackend& backend,
                                 const ClusterParams& params,
                                 EmbeddingCache* cache) {
  if (responses.responses.empty()) throw std::invalid_argument("empty response set");
  const std::vector<EmbeddingVector> vectors =
      embed_batch(responses.responses, backend, cache);

  EmbeddingMatrix matrix(static_cast<Eigen::Index>(vectors.size()),
                         static_cast<Eigen::Index>(vectors[0].dimension()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < vectors[i].values.size(); ++j) {
      matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          vectors[i].values[j];
    }
  }

  const PcaModel model = fit_pca(matrix);
  UncertaintyRecord record = score_points(project(model, matrix), params);
  record.instance_id = responses.instance_id;
  record.temperature = responses.temperature;
  return record;
}

StatsSummary summarize(const std::vector<UncertaintyRecord>& records,
                       double temperature) {
  std::vector<double> values;
  for (const UncertaintyRecord& r : records) {
    if (r.temperature == temperature) values.push_back(r.total_area);
  }
  if (values.empty()) {
    throw std::invalid_argument("no records at temperature " +
                                format_double(temperature));
  }

  StatsSummary summary;
  summary.temperature = temperature;
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  summary.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - summary.mean) * (v - summary.mean);
    summary.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  std::sort(values.begin(), values.end());
  summary.min = values.front();
  summary.max = values.back();
  for (int p : {10, 25, 50, 75, 90}) {
    const std::size_t count = static_cast<std::size_t>(
        std::ceil(static_cast<double>(p) / 100.0 * static_cast<double>(n)));
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += values[i];
    summary.cumulative_means[p] = s / static_cast<double>(count);
  }
  return summary;
}

Histogram histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  Histogram hist;
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, v);
  const double span = vmax > 0.0 ? vmax : 1.0;
  const double width = span / bins;
  for (int b = 0; b <= bins; ++b) hist.edges.push_back(width * b);
  hist.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    int b = static_cast<int>(v / width);
    if (b >= bins) b = bins - 1;  // v == max lands in the last bin
    ++hist.counts[static_cast<std::size_t>(b)];
  }
  return hist;
}

ContourMap contour_map(const UncertaintyRecord& record, int grid) {
  if (grid < 16) throw std::invalid_argument("grid must be >= 16");
  if (record.points.empty()) throw std::invalid_argument("no points to map");

  ContourMap map;
  map.grid = grid;
  map.points = record.points;
  const std::size_t n = record.points.size();

  double mx = 0.0, my = 0.0;
  for (const Point2D& p : record.points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sx = 0.0, sy = 0.0;
  if (n > 1) {
    for (const Point2D& p : record.points) {
      sx += (p.x - mx) * (p.x - mx);
      sy += (p.y - my) * (p.y - my);
    }
    sx = std::sqrt(sx / static_cast<double>(n - 1));
    sy = std::sqrt(sy / static_cast<double>(n - 1));
  }

  // Scott's rule per dimension with a floor so zero-spread sets still
  // render a smooth bump.
  const double scott = std::pow(static_cast<double>(n), -1.0 / 6.0);
  const double hx = std::max(sx * scott, 1e-6);
  const double hy = std::max(sy * scott, 1e-6);

  double xmin = record.points[0].x, xmax = xmin;
  double ymin = record.points[0].y, ymax = ymin;
  for (const Point2D& p : record.points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  // Pad by 5 bandwidths so nearly all kernel mass stays on the lattice.
  map.x0 = xmin - 5.0 * hx;
  map.x1 = xmax + 5.0 * hx;
  map.y0 = ymin - 5.0 * hy;
  map.y1 = ymax + 5.0 * hy;

  const double cw = (map.x1 - map.x0) / grid;
  const double ch = (map.y1 - map.y0) / grid;
  const double norm = 1.0 / (static_cast<double>(n) * 2.0 * M_PI * hx * hy);
  map.density.assign(static_cast<std::size_t>(grid) * grid, 0.0);
  for (int gy = 0; gy < grid; ++gy) {
    const double y = map.y0 + (gy + 0.5) * ch;
    for (int gx = 0; gx < grid; ++gx) {
      const double x = map.x0 + (gx + 0.5) * cw;
      double f = 0.0;
      for (const Point2D& p : record.points) {
        const double dx = (x - p.x) / hx;
        const double dy = (y - p.y) / hy;
        f += std::exp(-0.5 * (dx * dx + dy * dy));
      }
      map.density[static_cast<std::size_t>(gy) * grid + gx] = norm * f;
    }
  }

  for (int c = 0; c < record.labels.cluster_count; ++c) {
    std::vector<Point2D> members;
    for (std::size_t i = 0; i < record.points.size(); ++i) {
      if (record.labels.labels[i] == c) members.push_back(record.points[i]);
    }
    if (members.size() >= 3) {
      map.hulls.push_back(convex_hull(std::span<const Point2D>(members)).vertices);
    }
  }
  return map;
}

namespace {

std::vector<Point2D> gaussian_cloud(std::uint64_t seed, int count, double sigma) {
  std::uint64_t state = splitmix64(seed ^ 0x6c62272e07bb0142ull);
  std::vector<Point2D> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    points.push_back({sigma * next_normal(state), sigma * next_normal(state)});
  }
  return points;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

LemmaReport lemma_suite(const LemmaSuiteConfig& config) {
  LemmaReport report;

  // (a) Spread monotonicity: clouds with larger sigma must have larger
  // median total area. DBSCAN and the hull both see the raw points.
  for (double sigma : config.sigmas) {
    std::vector<double> areas;
    for (int s = 0; s < config.seeds_per_sigma; ++s) {
      const auto cloud = gaussian_cloud(config.seed + static_cast<std::uint64_t>(s),
                                        config.points_per_cloud, sigma);
      areas.push_back(score_points(cloud, config.params).total_area);
    }
    report.sigma_medians.push_back(median(areas));
  }
  report.spread_monotonic = true;
  for (std::size_t i = 1; i < report.sigma_medians.size(); ++i) {
    if (!(report.sigma_medians[i] > report.sigma_medians[i - 1])) {
      report.spread_monotonic = false;
      report.detail += "sigma medians not increasing at step " + std::to_string(i) + "; ";
    }
  }

  // Scale law: scaling points and epsilon by k (the clustering is then
  // identical) multiplies the area by exactly k^2.
  report.scale_law_holds = true;
  const double k = 2.0;
  for (int s = 0; s < config.seeds_per_sigma; ++s) {
    const auto cloud = gaussian_cloud(config.seed + static_cast<std::uint64_t>(s),
                                      config.points_per_cloud, 0.1);
    const double base = score_points(cloud, config.params).total_area;
    std::vector<Point2D> scaled = cloud;
    for (Point2D& p : scaled) {
      p.x *= k;
      p.y *= k;
    }
    ClusterParams scaled_params = config.params;
    scaled_params.epsilon *= k;
    const double grown = score_points(scaled, scaled_params).total_area;
    const double expect = base * k * k;
    const double rel = expect == 0.0 ? std::abs(grown)
                                     : std::abs(grown - expect) / expect;
    if (rel > 1e-9) {
      report.scale_law_holds = false;
      report.detail += "scale law broken at seed " + std::to_string(s) + "; ";
    }
  }

  // (b) Additivity + noise exclusion on a three-blob fixture.
  {
    std::vector<Point2D> fixture;
    std::vector<std::vector<Point2D>> blobs;
    const Point2D centers[3] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
    std::uint64_t state = splitmix64(config.seed ^ 0x3c1e9d4a2b5f7086ull);
    for (const Point2D& c : centers) {
      std::vector<Point2D> blob;
      for (int i = 0; i < 6; ++i) {
        blob.push_back({c.x + 0.05 * next_normal(state),
                        c.y + 0.05 * next_normal(state)});
      }
      fixture.insert(fixture.end(), blob.begin(), blob.end());
      blobs.push_back(std::move(blob));
    }
    const UncertaintyRecord record = score_points(fixture, config.params);
    double independent_sum = 0.0;
    for (const auto& blob : blobs) {
      independent_sum += convex_hull(std::span<const Point2D>(blob)).area;
    }
    report.additive = record.labels.cluster_count == 3 &&
                      record.total_area == independent_sum;
    if (!report.additive) report.detail += "additivity fixture failed; ";

    std::vector<Point2D> with_noise = fixture;
    with_noise.push_back({100.0, 100.0});
    const UncertaintyRecord noisy = score_points(with_noise, config.params);
    report.noise_invariant = noisy.total_area == record.total_area &&
                             noisy.noise_count == record.noise_count + 1;
    if (!report.noise_invariant) report.detail += "noise singleton changed the total; ";
  }

  // (c) Temperature sensitivity through the full mock pipeline.
  {
    MockGenerator generator;
    LocalHashEmbedder embedder(256);
    for (double t : config.temperatures) {
      double sum = 0.0;
      for (int inst = 0; inst < config.sweep_instances; ++inst) {
        ResponseSet set;
        set.instance_id = "sweep-" + std::to_string(inst);
        set.temperature = t;
        for (int s = 0; s < config.sweep_samples; ++s) {
          const std::uint64_t seed = derive_seed(config.seed, set.instance_id, t, s);
          set.responses.push_back({generator.generate("", "", t, seed),
                                   set.instance_id, s});
        }
        sum += score_instance(set, embedder, config.params).total_area;
      }
      report.temperature_means.push_back(sum / config.sweep_instances);
    }
    report.temperature_monotonic = true;
    for (std::size_t i = 1; i < report.temperature_means.size(); ++i) {
      if (!(report.temperature_means[i] > report.temperature_means[i - 1])) {
        report.temperature_monotonic = false;
        report.detail += "temperature means not increasing at step " +
                         std::to_string(i) + "; ";
      }
    }
  }
  return report;
}

// --- artifact writers ---------------------------------------------------

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (!path.parent_path().empty()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_uncertainty_csv(const std::vector<UncertaintyRecord>& records,
                           const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "instance_id,temperature,total_area,noise_count,k_clusters\n";
  for (const UncertaintyRecord& r : records) {
    out << r.instance_id << ',' << format_double(r.temperature) << ','
        << format_double(r.total_area) << ',' << r.noise_count << ','
        << r.cluster_areas.size() << '\n';
  }
}

void write_stats_csv(const std::vector<StatsSummary>& summaries,
                     const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "statistic";
  for (const StatsSummary& s : summaries) out << ',' << format_double(s.temperature);
  out << '\n';
  auto row = [&](const std::string& name, auto getter) {
    out << name;
    for (const StatsSummary& s : summaries) out << ',' << format_double(getter(s));
    out << '\n';
  };
  row("Mean", [](const StatsSummary& s) { return s.mean; });
  row("Std", [](const StatsSummary& s) { return s.std; });
  row("Min", [](const StatsSummary& s) { return s.min; });
  row("Max", [](const StatsSummary& s) { return s.max; });
  for (int p : {10, 25, 50, 75, 90}) {
    row(std::to_string(p) + "%",
        [p](const StatsSummary& s) { return s.cumulative_means.at(p); });
  }
}

void write_histogram_csv(const Histogram& hist, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "bin_start,bin_end,count\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    out << format_double(hist.edges[b]) << ',' << format_double(hist.edges[b + 1])
        << ',' << hist.counts[b] << '\n';
  }
}

void write_histogram_svg(const Histogram& hist, const std::string& title,
                         const std::filesystem::path& path) {
  const int width = 640, height = 400, margin = 48;
  long peak = 1;
  for (long c : hist.counts) peak = std::max(peak, c);

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  const double plot_w = width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;
  const double bar_w = plot_w / hist.counts.size();
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    const double h = plot_h * static_cast<double>(hist.counts[b]) / peak;
    out << "<rect x=\"" << margin + b * bar_w << "\" y=\""
        << height - margin - h << "\" width=\"" << bar_w * 0.92
        << "\" height=\"" << h << "\" fill=\"#4878cf\"/>\n";
  }
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << height - margin + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(hist.edges.front()) << "</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(hist.edges.back()) << "</text>\n";
  out << "</svg>\n";
}

void write_contour_csv(const ContourMap& map, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "x,y,density\n";
  const double cw = (map.x1 - map.x0) / map.grid;
  const double ch = (map.y1 - map.y0) / map.grid;
  for (int gy = 0; gy < map.grid; ++gy) {
    for (int gx = 0; gx < map.grid; ++gx) {
      out << format_double(map.x0 + (gx + 0.5) * cw) << ','
          << format_double(map.y0 + (gy + 0.5) * ch) << ','
          << format_double(map.density[static_cast<std::size_t>(gy) * map.grid + gx])
          << '\n';
    }
  }
}

namespace {

// Viridis-like ramp: purple at low density through turquoise to yellow.
std::string density_color(double t) {
  struct Stop {
    double t;
    int r, g, b;
  };
  static const Stop stops[] = {{0.0, 68, 1, 84},
                               {0.35, 49, 104, 142},
                               {0.65, 53, 183, 121},
                               {1.0, 253, 231, 37}};
  const Stop* lo = &stops[0];
  const Stop* hi = &stops[3];
  for (std::size_t i = 0; i + 1 < std::size(stops); ++i) {
    if (t >= stops[i].t && t <= stops[i + 1].t) {
      lo = &stops[i];
      hi = &stops[i + 1];
      break;
    }
  }
  const double f = hi->t == lo->t ? 0.0 : (t - lo->t) / (hi->t - lo->t);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(lo->r + f * (hi->r - lo->r)),
                static_cast<int>(lo->g + f * (hi->g - lo->g)),
                static_cast<int>(lo->b + f * (hi->b - lo->b)));
  return buf;
}

}  // namespace

void write_contour_svg(const ContourMap& map, const std::string& title,
                       const std::filesystem::path& path) {
  const int size = 480, margin = 32;
  const double plot = size - 2.0 * margin;
  const double cell = plot / map.grid;
  double peak = 0.0;
  for (double d : map.density) peak = std::max(peak, d);
  if (peak <= 0.0) peak = 1.0;

  auto sx = [&](double x) {
    return margin + plot * (x - map.x0) / (map.x1 - map.x0);
  };
  auto sy = [&](double y) {
    return size - margin - plot * (y - map.y0) / (map.y1 - map.y0);
  };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size + 24 << "\">\n";
  out << "<text x=\"" << size / 2 << "\" y=\"16\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
  for (int gy = 0; gy < map.grid; ++gy) {
    for (int gx = 0; gx < map.grid; ++gx) {
      const double d = map.density[static_cast<std::size_t>(gy) * map.grid + gx];
      out << "<rect x=\"" << margin + gx * cell << "\" y=\""
          << size - margin - (gy + 1) * cell << "\" width=\"" << cell + 0.5
          << "\" height=\"" << cell + 0.5 << "\" fill=\""
          << density_color(d / peak) << "\"/>\n";
    }
  }
  for (const auto& hull : map.hulls) {
    out << "<polygon points=\"";
    for (const Point2D& v : hull) out << sx(v.x) << ',' << sy(v.y) << ' ';
    out << "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\" "
        << "stroke-dasharray=\"6,4\"/>\n";
  }
  for (const Point2D& p : map.points) {
    out << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
        << "\" r=\"2.5\" fill=\"#d62728\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace hulluq
