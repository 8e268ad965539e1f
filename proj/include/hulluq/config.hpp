#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hulluq/collector.hpp"

namespace hulluq {

/// One run, fully described. Defaults reproduce the reference protocol:
/// the fixed report prompt, 5 temperatures, n=30, epsilon=0.25,
/// min_samples=3.
struct RunConfig {
  std::string prompt = kDefaultPrompt;
  std::string metadata_csv;
  std::string image_dir;
  std::string out_dir = "out";
  std::string responses_path;  // defaults to <out>/responses.jsonl
  std::vector<double> temperatures{std::begin(kDefaultTemperatures),
                                   std::end(kDefaultTemperatures)};
  int samples_per_setting = kDefaultSamplesPerSetting;
  double epsilon = 0.25;
  int min_samples = 3;
  std::uint64_t seed = 0;
  std::string backend = "mock";    // mock | remote
  std::string embedder = "local";  // local | remote
  std::string gen_url;
  std::string gen_model = "llm-cxr";
  std::string embed_url;
  std::string embed_model = "bert-base";
  int embed_dim = 256;
  int histogram_bins = 30;
  int contour_grid = 64;
  int top_k = 2;
  int mock_instances = 2;  // synthetic instances when no metadata CSV is given
  int max_in_flight = 4;
  bool normalize = false;  // divide areas by the run maximum before reporting

  std::string responses_file() const {
    return responses_path.empty() ? out_dir + "/responses.jsonl" : responses_path;
  }
};

using KeyValues = std::map<std::string, std::string>;

/// Parse a plain key=value config file ('#' comments, blank lines ok).
/// Throws std::runtime_error when the file cannot be read.
KeyValues read_config_file(const std::string& path);

/// Collect HULLUQ_<KEY> environment overrides for the known keys.
KeyValues read_env_overrides();

/// Layer the sources as CLI flag > env var > config file > default and
/// validate. Throws std::invalid_argument on bad keys or values.
RunConfig make_config(const KeyValues& file_kv, const KeyValues& env_kv,
                      const KeyValues& cli_kv);

std::vector<double> parse_temperature_list(const std::string& text);

}  // namespace hulluq
