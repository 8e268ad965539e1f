#include "hulluq/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "hulluq/analysis.hpp"

namespace hulluq {

namespace {

std::string temp_tag(double t) { return "t" + format_double(t); }

std::string sanitize_filename(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' &&
        c != '.') {
      c = '_';
    }
  }
  return out;
}

std::unique_ptr<EmbedderBackend> make_embedder(const RunConfig& config) {
  if (config.embedder == "remote") {
    return std::make_unique<RemoteEmbedder>(config.embed_url, config.embed_model);
  }
  return std::make_unique<LocalHashEmbedder>(config.embed_dim);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

int cmd_collect(const RunConfig& config, std::ostream& log) {
  CollectionJob job;
  job.prompt = config.prompt;
  job.temperatures = config.temperatures;
  job.samples_per_setting = config.samples_per_setting;
  job.seed = config.seed;
  job.max_in_flight = config.max_in_flight;

  if (!config.metadata_csv.empty()) {
    MetadataLoadResult metadata;
    try {
      const std::filesystem::path csv = config.metadata_csv;
      const std::filesystem::path images =
          config.image_dir.empty() ? csv.parent_path() / "images"
                                   : std::filesystem::path(config.image_dir);
      metadata = load_metadata(csv, images);
    } catch (const std::exception& e) {
      log << "error: " << e.what() << "\n";
      return kExitDataError;
    }
    log << "metadata: " << metadata.records.size() << " records ("
        << metadata.total_data_lines << " lines, " << metadata.malformed_rows
        << " malformed)\n";
    for (const MetadataRecord& record : metadata.records) {
      if (record.image_missing) {
        log << "skipping " << record.filename << ": image file missing\n";
        continue;
      }
      job.instances.push_back({record.filename, record.filename});
    }
    if (job.instances.empty()) {
      log << "error: no usable instances in " << config.metadata_csv << "\n";
      return kExitDataError;
    }
  } else {
    for (int i = 0; i < config.mock_instances; ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "inst-%03d", i);
      job.instances.push_back({id, std::string("mock://") + id});
    }
  }

  std::unique_ptr<GenerationBackend> backend;
  if (config.backend == "remote") {
    backend = std::make_unique<RemoteGenerator>(config.gen_url, config.gen_model);
  } else {
    backend = std::make_unique<MockGenerator>();
  }

  std::vector<ResponseSet> sets;
  try {
    sets = collect(job, *backend, config.responses_file());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitBackendError;
  }

  std::map<double, long> counts;
  long total = 0;
  for (const ResponseSet& set : sets) {
    counts[set.temperature] += static_cast<long>(set.responses.size());
    total += static_cast<long>(set.responses.size());
    if (set.partial) {
      log << "partial: " << set.instance_id << " @ T=" << format_double(set.temperature)
          << " short by " << set.shortfall << "\n";
    }
  }
  for (const auto& [t, count] : counts) {
    log << "T=" << format_double(t) << ": " << count << " responses\n";
  }
  log << "total: " << total << " responses in " << config.responses_file() << "\n";
  if (total == 0) {
    log << "error: backend produced no responses\n";
    return kExitBackendError;
  }
  return kExitOk;
}

int cmd_analyze(const RunConfig& config, std::ostream& log) {
  std::vector<ResponseSet> sets = load_responses(config.responses_file());
  if (sets.empty()) {
    log << "error: no responses in " << config.responses_file() << "\n";
    return kExitDataError;
  }
  std::sort(sets.begin(), sets.end(), [](const ResponseSet& a, const ResponseSet& b) {
    return a.temperature != b.temperature ? a.temperature < b.temperature
                                          : a.instance_id < b.instance_id;
  });

  std::unique_ptr<EmbedderBackend> embedder = make_embedder(config);
  EmbeddingCache cache(std::filesystem::path(config.out_dir) / "cache");
  ClusterParams params{config.epsilon, config.min_samples};

  std::vector<UncertaintyRecord> records;
  try {
    for (const ResponseSet& set : sets) {
      records.push_back(score_instance(set, *embedder, params, &cache));
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitBackendError;
  }

  if (config.normalize) {
    double peak = 0.0;
    for (const UncertaintyRecord& r : records) peak = std::max(peak, r.total_area);
    if (peak > 0.0) {
      for (UncertaintyRecord& r : records) {
        r.total_area /= peak;
        for (ClusterArea& ca : r.cluster_areas) ca.area /= peak;
      }
    }
  }

  const std::filesystem::path out_dir = config.out_dir;
  write_uncertainty_csv(records, out_dir / "uncertainty.csv");

  std::set<double> temps;
  for (const UncertaintyRecord& r : records) temps.insert(r.temperature);
  std::vector<StatsSummary> summaries;
  for (double t : temps) summaries.push_back(summarize(records, t));
  write_stats_csv(summaries, out_dir / "stats.csv");

  for (double t : temps) {
    std::vector<double> values;
    for (const UncertaintyRecord& r : records) {
      if (r.temperature == t) values.push_back(r.total_area);
    }
    const Histogram hist = histogram(values, config.histogram_bins);
    const std::string tag = temp_tag(t);
    write_histogram_csv(hist, out_dir / ("histogram_" + tag + ".csv"));
    write_histogram_svg(hist, "Uncertainty distribution at T=" + format_double(t),
                        out_dir / ("histogram_" + tag + ".svg"));
  }

  for (const UncertaintyRecord& r : records) {
    const std::string stem =
        sanitize_filename(r.instance_id) + "_" + temp_tag(r.temperature);
    const ContourMap map = contour_map(r, config.contour_grid);
    write_contour_csv(map, out_dir / "contours" / (stem + ".csv"));
    write_contour_svg(map,
                      r.instance_id + " @ T=" + format_double(r.temperature) +
                          " (A=" + format_double(r.total_area) + ")",
                      out_dir / "contours" / (stem + ".svg"));
  }

  log << "analyzed " << records.size() << " instances at " << temps.size()
      << " temperatures; outputs in " << config.out_dir << "\n";
  return kExitOk;
}

int cmd_report(const RunConfig& config, std::ostream& log) {
  const std::filesystem::path out_dir = config.out_dir;
  const auto stats_path = out_dir / "stats.csv";
  const auto uncertainty_path = out_dir / "uncertainty.csv";
  if (!std::filesystem::exists(stats_path) ||
      !std::filesystem::exists(uncertainty_path)) {
    log << "error: analysis outputs missing in " << config.out_dir
        << " (run analyze first)\n";
    return kExitDataError;
  }

  struct Row {
    std::string instance_id;
    double temperature;
    double total_area;
  };
  std::vector<Row> rows;
  {
    std::ifstream in(uncertainty_path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::stringstream stream(line);
      std::string id, t, area;
      std::getline(stream, id, ',');
      std::getline(stream, t, ',');
      std::getline(stream, area, ',');
      if (!id.empty()) rows.push_back({id, std::stod(t), std::stod(area)});
    }
  }
  if (rows.empty()) {
    log << "error: uncertainty.csv has no rows\n";
    return kExitDataError;
  }

  std::map<std::string, std::vector<std::string>> responses_by_key;
  for (const ResponseSet& set : load_responses(config.responses_file())) {
    std::vector<std::string> texts;
    for (const ResponseText& r : set.responses) texts.push_back(r.text);
    responses_by_key[set.instance_id + "@" + format_double(set.temperature)] =
        std::move(texts);
  }

  std::set<double> temps;
  for (const Row& r : rows) temps.insert(r.temperature);

  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
       << "<title>Convex-hull uncertainty report</title>\n"
       << "<style>body{font-family:sans-serif;max-width:960px;margin:auto}"
       << "table{border-collapse:collapse}td,th{border:1px solid #999;"
       << "padding:4px 10px}pre{background:#f4f4f4;padding:8px;"
       << "white-space:pre-wrap}</style></head><body>\n"
       << "<h1>Convex-hull uncertainty report</h1>\n";

  // Statistics table, verbatim from stats.csv.
  html << "<h2>Statistics by temperature</h2>\n<table>\n";
  {
    std::ifstream in(stats_path);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      html << "<tr>";
      std::stringstream stream(line);
      std::string cell;
      while (std::getline(stream, cell, ',')) {
        html << (header ? "<th>" : "<td>") << html_escape(cell)
             << (header ? "</th>" : "</td>");
      }
      html << "</tr>\n";
      header = false;
    }
  }
  html << "</table>\n";

  for (double t : temps) {
    html << "<h2 class=\"histogram-section\">Histogram, T=" << format_double(t)
         << "</h2>\n";
    const auto svg = out_dir / ("histogram_" + temp_tag(t) + ".svg");
    if (std::filesystem::exists(svg)) {
      html << read_text_file(svg) << "\n";
    }
  }

  auto panel = [&](const std::string& heading, const std::vector<Row>& chosen) {
    html << "<h2>" << heading << "</h2>\n";
    for (const Row& r : chosen) {
      html << "<h3>" << html_escape(r.instance_id)
           << " @ T=" << format_double(r.temperature)
           << " (total area " << format_double(r.total_area) << ")</h3>\n";
      const auto it =
          responses_by_key.find(r.instance_id + "@" + format_double(r.temperature));
      if (it != responses_by_key.end()) {
        html << "<pre>";
        for (const std::string& text : it->second) html << html_escape(text) << "\n";
        html << "</pre>\n";
      }
    }
  };

  std::vector<Row> sorted = rows;
  // Ties break on instance_id ascending so the selection is reproducible.
  std::sort(sorted.begin(), sorted.end(), [](const Row& a, const Row& b) {
    return a.total_area != b.total_area ? a.total_area > b.total_area
                                        : a.instance_id < b.instance_id;
  });
  const std::size_t k =
      std::min<std::size_t>(static_cast<std::size_t>(config.top_k), sorted.size());
  panel("Most uncertain instances",
        std::vector<Row>(sorted.begin(), sorted.begin() + k));
  std::sort(sorted.begin(), sorted.end(), [](const Row& a, const Row& b) {
    return a.total_area != b.total_area ? a.total_area < b.total_area
                                        : a.instance_id < b.instance_id;
  });
  panel("Least uncertain instances",
        std::vector<Row>(sorted.begin(), sorted.begin() + k));

  html << "</body></html>\n";

  const auto report_path = out_dir / "report.html";
  std::ofstream out(report_path);
  out << html.str();
  log << "report written to " << report_path.string() << "\n";
  return kExitOk;
}

}  // namespace hulluq
