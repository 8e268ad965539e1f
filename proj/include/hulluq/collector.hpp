#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hulluq/embedding.hpp"

namespace hulluq {

inline constexpr const char* kDefaultPrompt =
    "Generate a comprehensive radiology report for the entered chest X-ray image.";
inline constexpr double kDefaultTemperatures[] = {0.001, 0.25, 0.50, 0.75, 1.00};
inline constexpr int kDefaultSamplesPerSetting = 30;

/// Text generation backend: (prompt, opaque image bytes, temperature,
/// seed) -> sampled text. Real endpoints ignore the seed.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string generate(const std::string& prompt, const std::string& image_b64,
                               double temperature, std::uint64_t seed) = 0;
};

/// Seeded token sampler over a pinned logit table: each of the
/// kSequenceLength tokens is drawn from softmax(logits / temperature).
/// The temperature -> 0 limit is the argmax sequence. Counts calls so
/// resume tests can assert nothing was regenerated.
class MockGenerator final : public GenerationBackend {
 public:
  static constexpr int kVocabSize = 16;
  static constexpr int kSequenceLength = 12;

  std::string id() const override { return "mock"; }
  std::string generate(const std::string& prompt, const std::string& image_b64,
                       double temperature, std::uint64_t seed) override;

  /// softmax(logits / temperature) over the pinned table.
  static std::vector<double> token_probabilities(double temperature);
  static const char* token_text(int index);

  long calls() const { return calls_.load(); }

 private:
  std::atomic<long> calls_{0};
};

/// Client for the common chat-completions shape:
///   POST {"model", "messages":[{"role","content"}], "temperature"}
///     -> {"choices":[{"message":{"content"}}]}
/// Auth token from HULLUQ_GEN_TOKEN when set. Image bytes, when
/// provided, ride along base64-encoded in an "image" field.
class RemoteGenerator final : public GenerationBackend {
 public:
  RemoteGenerator(std::string base_url, std::string model,
                  int max_retries = 3, int timeout_seconds = 60);
  std::string id() const override;
  std::string generate(const std::string& prompt, const std::string& image_b64,
                       double temperature, std::uint64_t seed) override;

 private:
  std::string base_url_;
  std::string model_;
  int max_retries_;
  int timeout_seconds_;
};

struct InstanceRef {
  std::string instance_id;
  std::string image_ref;
};

struct CollectionJob {
  std::string prompt = kDefaultPrompt;
  std::vector<InstanceRef> instances;
  std::vector<double> temperatures{std::begin(kDefaultTemperatures),
                                   std::end(kDefaultTemperatures)};
  int samples_per_setting = kDefaultSamplesPerSetting;
  std::uint64_t seed = 0;
  int max_in_flight = 4;
};

/// All responses for one (instance, temperature) pair.
struct ResponseSet {
  std::string instance_id;
  std::string image_ref;
  std::string prompt;
  double temperature = 0.0;
  std::vector<ResponseText> responses;
  std::string backend_id;
  bool partial = false;
  int shortfall = 0;  // requested minus collected, when partial
};

/// Collect job.samples_per_setting responses per (instance, temperature),
/// appending each response to `jsonl_path` before returning it. Pairs
/// already complete in the file are skipped (resume). Backend failures
/// after retries yield a partial set; the run continues.
std::vector<ResponseSet> collect(const CollectionJob& job, GenerationBackend& backend,
                                 const std::filesystem::path& jsonl_path);

/// Read ResponseSets back from a responses.jsonl file.
std::vector<ResponseSet> load_responses(const std::filesystem::path& jsonl_path);

struct MetadataRecord {
  std::string filename;
  std::string finding;
  std::vector<std::pair<std::string, std::string>> extra_fields;
  bool image_missing = false;
};

struct MetadataLoadResult {
  std::vector<MetadataRecord> records;
  int malformed_rows = 0;
  int total_data_lines = 0;
};

/// Parse a metadata CSV ("filename" and "finding" columns required).
/// Rows whose image file is absent under `image_dir` are flagged, not
/// dropped; malformed rows are skipped and counted.
MetadataLoadResult load_metadata(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& image_dir);

/// Stable per-sample seed derived from (master seed, instance, temperature, index).
std::uint64_t derive_seed(std::uint64_t master, const std::string& instance_id,
                          double temperature, int sample_index);

}  // namespace hulluq
