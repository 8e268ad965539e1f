#include "hulluq/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hulluq {

namespace {

const char* kKnownKeys[] = {
    "prompt",     "metadata_csv", "image_dir",  "out",        "responses",
    "temperatures", "samples",    "epsilon",    "min_samples", "seed",
    "backend",    "embedder",     "gen_url",    "gen_model",  "embed_url",
    "embed_model", "embed_dim",   "bins",       "grid",       "top_k",
    "mock_instances", "max_in_flight", "normalize"};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw std::invalid_argument("bad value for " + key + ": '" + value + "'");
  }
  return v;
}

long to_long(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw std::invalid_argument("bad value for " + key + ": '" + value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("bad value for " + key + ": '" + value + "'");
}

void apply(RunConfig& config, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (std::find_if(std::begin(kKnownKeys), std::end(kKnownKeys),
                     [&](const char* k) { return key == k; }) ==
        std::end(kKnownKeys)) {
      throw std::invalid_argument("unknown config key: " + key);
    }
    if (key == "prompt") config.prompt = value;
    else if (key == "metadata_csv") config.metadata_csv = value;
    else if (key == "image_dir") config.image_dir = value;
    else if (key == "out") config.out_dir = value;
    else if (key == "responses") config.responses_path = value;
    else if (key == "temperatures") config.temperatures = parse_temperature_list(value);
    else if (key == "samples") config.samples_per_setting = static_cast<int>(to_long(key, value));
    else if (key == "epsilon") config.epsilon = to_double(key, value);
    else if (key == "min_samples") config.min_samples = static_cast<int>(to_long(key, value));
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(to_long(key, value));
    else if (key == "backend") config.backend = value;
    else if (key == "embedder") config.embedder = value;
    else if (key == "gen_url") config.gen_url = value;
    else if (key == "gen_model") config.gen_model = value;
    else if (key == "embed_url") config.embed_url = value;
    else if (key == "embed_model") config.embed_model = value;
    else if (key == "embed_dim") config.embed_dim = static_cast<int>(to_long(key, value));
    else if (key == "bins") config.histogram_bins = static_cast<int>(to_long(key, value));
    else if (key == "grid") config.contour_grid = static_cast<int>(to_long(key, value));
    else if (key == "top_k") config.top_k = static_cast<int>(to_long(key, value));
    else if (key == "mock_instances") config.mock_instances = static_cast<int>(to_long(key, value));
    else if (key == "max_in_flight") config.max_in_flight = static_cast<int>(to_long(key, value));
    else if (key == "normalize") config.normalize = to_bool(key, value);
  }
}

}  // namespace

std::vector<double> parse_temperature_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_double("temperatures", item));
  }
  if (out.empty()) throw std::invalid_argument("empty temperature list");
  return out;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  KeyValues kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               " is not key=value: " + stripped);
    }
    kv[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
  }
  return kv;
}

KeyValues read_env_overrides() {
  KeyValues kv;
  for (const char* key : kKnownKeys) {
    std::string env_name = "HULLUQ_";
    for (const char* c = key; *c; ++c) {
      env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
    }
    if (const char* value = std::getenv(env_name.c_str())) kv[key] = value;
  }
  return kv;
}

RunConfig make_config(const KeyValues& file_kv, const KeyValues& env_kv,
                      const KeyValues& cli_kv) {
  RunConfig config;
  apply(config, file_kv);
  apply(config, env_kv);
  apply(config, cli_kv);

  if (config.samples_per_setting < 1) {
    throw std::invalid_argument("samples must be >= 1");
  }
  if (config.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  if (config.min_samples < 1) throw std::invalid_argument("min_samples must be >= 1");
  if (config.embed_dim < 2) throw std::invalid_argument("embed_dim must be >= 2");
  if (config.histogram_bins < 1) throw std::invalid_argument("bins must be >= 1");
  if (config.contour_grid < 16) throw std::invalid_argument("grid must be >= 16");
  for (double t : config.temperatures) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw std::invalid_argument("temperatures must lie in (0, 1]");
    }
  }
  if (config.backend != "mock" && config.backend != "remote") {
    throw std::invalid_argument("backend must be 'mock' or 'remote'");
  }
  if (config.embedder != "local" && config.embedder != "remote") {
    throw std::invalid_argument("embedder must be 'local' or 'remote'");
  }
  if (config.backend == "remote" && config.gen_url.empty()) {
    throw std::invalid_argument("remote backend requires gen_url");
  }
  if (config.embedder == "remote" && config.embed_url.empty()) {
    throw std::invalid_argument("remote embedder requires embed_url");
  }
  return config;
}

}  // namespace hulluq
