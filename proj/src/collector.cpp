#include "hulluq/collector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hulluq/rng.hpp"

namespace hulluq {

namespace {

// Pinned vocabulary and logits for the mock generator. Logits are
// strictly descending, so the argmax sequence is unambiguous.
constexpr const char* kVocab[MockGenerator::kVocabSize] = {
    "lungs",  "clear",    "no",     "acute",   "effusion", "mild",
    "opacity", "bibasilar", "consolidation", "cardiomegaly", "pneumothorax",
    "atelectasis", "edema", "scarring", "nodule", "pleural"};
constexpr double kLogits[MockGenerator::kVocabSize] = {
    4.00, 3.55, 3.15, 2.80, 2.45, 2.15, 1.85, 1.60,
    1.35, 1.10, 0.90, 0.70, 0.50, 0.35, 0.20, 0.00};

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Minimal RFC 4180 CSV line splitter (quoted fields may contain commas
// and doubled quotes). Clinical-notes columns need this.
std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

std::vector<double> MockGenerator::token_probabilities(double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  std::vector<double> p(kVocabSize);
  const double max_logit = kLogits[0];
  double sum = 0.0;
  for (int i = 0; i < kVocabSize; ++i) {
    p[i] = std::exp((kLogits[i] - max_logit) / temperature);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

const char* MockGenerator::token_text(int index) { return kVocab[index]; }

std::string MockGenerator::generate(const std::string& /*prompt*/,
                                    const std::string& /*image_b64*/,
                                    double temperature, std::uint64_t seed) {
  const std::vector<double> probs = token_probabilities(temperature);
  calls_.fetch_add(1);

  std::uint64_t state = splitmix64(seed ^ 0x5bf0363546469f1bull);
  std::string text;
  for (int pos = 0; pos < kSequenceLength; ++pos) {
    const double u = next_uniform(state);
    double acc = 0.0;
    int token = kVocabSize - 1;
    for (int i = 0; i < kVocabSize; ++i) {
      acc += probs[i];
      if (u < acc) {
        token = i;
        break;
      }
    }
    if (pos > 0) text += ' ';
    text += kVocab[token];
  }
  return text;
}

RemoteGenerator::RemoteGenerator(std::string base_url, std::string model,
                                 int max_retries, int timeout_seconds)
    : base_url_(std::move(base_url)),
      model_(std::move(model)),
      max_retries_(max_retries),
      timeout_seconds_(timeout_seconds) {}

std::string RemoteGenerator::id() const { return "remote-" + model_; }

std::string RemoteGenerator::generate(const std::string& prompt,
                                      const std::string& image_b64,
                                      double temperature, std::uint64_t /*seed*/) {
  nlohmann::json message;
  message["role"] = "user";
  message["content"] = prompt;
  if (!image_b64.empty()) message["image"] = image_b64;

  nlohmann::json body;
  body["model"] = model_;
  body["messages"] = nlohmann::json::array({message});
  body["temperature"] = temperature;

  httplib::Client client(base_url_);
  client.set_read_timeout(timeout_seconds_, 0);
  httplib::Headers headers;
  if (const char* token = std::getenv("HULLUQ_GEN_TOKEN")) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < max_retries_; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
    }
    auto res = client.Post("/v1/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") ||
        parsed["choices"].empty()) {
      last_error = "malformed response body";
      continue;
    }
    return parsed["choices"][0].at("message").at("content").get<std::string>();
  }
  throw std::runtime_error("generation backend unreachable after " +
                           std::to_string(max_retries_) + " attempts (" +
                           last_error + ")");
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& instance_id,
                          double temperature, int sample_index) {
  std::uint64_t h = splitmix64(master);
  h = fnv1a64(instance_id, h);
  // Temperatures are config literals; scaling to integer millikelvin-style
  // units keeps the seed free of float formatting concerns.
  h = splitmix64(h ^ static_cast<std::uint64_t>(std::llround(temperature * 1e6)));
  return splitmix64(h ^ static_cast<std::uint64_t>(sample_index));
}

std::vector<ResponseSet> collect(const CollectionJob& job, GenerationBackend& backend,
                                 const std::filesystem::path& jsonl_path) {
  if (job.samples_per_setting < 1) {
    throw std::invalid_argument("samples_per_setting must be >= 1");
  }

  // Resume: count what the file already holds per (instance, temperature,
  // sample_index) so completed work is never regenerated.
  std::map<std::pair<std::string, double>, std::set<int>> existing;
  std::vector<ResponseSet> prior = load_responses(jsonl_path);
  for (const ResponseSet& set : prior) {
    auto& idx = existing[{set.instance_id, set.temperature}];
    for (const ResponseText& r : set.responses) idx.insert(r.sample_index);
  }

  if (!jsonl_path.parent_path().empty()) {
    std::filesystem::create_directories(jsonl_path.parent_path());
  }
  std::ofstream out(jsonl_path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + jsonl_path.string());
  std::mutex write_mutex;

  struct Task {
    std::size_t set_index;
    int sample_index;
  };

  std::vector<ResponseSet> sets;
  std::vector<Task> tasks;
  for (const InstanceRef& inst : job.instances) {
    for (double t : job.temperatures) {
      ResponseSet set;
      set.instance_id = inst.instance_id;
      set.image_ref = inst.image_ref;
      set.prompt = job.prompt;
      set.temperature = t;
      set.backend_id = backend.id();
      set.responses.resize(job.samples_per_setting);
      sets.push_back(std::move(set));

      const auto done = existing.find({inst.instance_id, t});
      for (int s = 0; s < job.samples_per_setting; ++s) {
        if (done != existing.end() && done->second.count(s)) {
          continue;  // already persisted
        }
        tasks.push_back({sets.size() - 1, s});
      }
    }
  }

  // Fill resumed samples from the prior file.
  for (const ResponseSet& set : prior) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (sets[i].instance_id == set.instance_id &&
          sets[i].temperature == set.temperature) {
        for (const ResponseText& r : set.responses) {
          if (r.sample_index >= 0 && r.sample_index < job.samples_per_setting) {
            sets[i].responses[r.sample_index] = r;
          }
        }
      }
    }
  }

  std::vector<std::vector<bool>> collected(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    collected[i].assign(job.samples_per_setting, false);
    for (int s = 0; s < job.samples_per_setting; ++s) {
      const auto done = existing.find({sets[i].instance_id, sets[i].temperature});
      if (done != existing.end() && done->second.count(s)) collected[i][s] = true;
    }
  }

  std::atomic<std::size_t> next_task{0};
  const int workers = std::max(1, std::min<int>(job.max_in_flight,
                                                static_cast<int>(tasks.size())));
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next_task.fetch_add(1);
      if (k >= tasks.size()) return;
      ResponseSet& set = sets[tasks[k].set_index];
      const int s = tasks[k].sample_index;
      const std::uint64_t seed =
          derive_seed(job.seed, set.instance_id, set.temperature, s);
      std::string text;
      try {
        text = backend.generate(set.prompt, /*image_b64=*/"", set.temperature, seed);
      } catch (const std::exception&) {
        continue;  // leaves the slot uncollected; set becomes partial
      }
      {
        std::lock_guard<std::mutex> lock(write_mutex);
        nlohmann::json line;
        line["instance_id"] = set.instance_id;
        line["image_ref"] = set.image_ref;
        line["prompt"] = set.prompt;
        line["temperature"] = set.temperature;
        line["sample_index"] = s;
        line["text"] = text;
        line["backend_id"] = set.backend_id;
        line["timestamp"] = iso8601_now();
        out << line.dump() << '\n';
        out.flush();
        set.responses[s] = {text, set.instance_id, s};
        collected[tasks[k].set_index][s] = true;
      }
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::vector<ResponseText> kept;
    int missing = 0;
    for (int s = 0; s < job.samples_per_setting; ++s) {
      if (collected[i][s]) {
        kept.push_back(sets[i].responses[s]);
      } else {
        ++missing;
      }
    }
    sets[i].responses = std::move(kept);
    sets[i].partial = missing > 0;
    sets[i].shortfall = missing;
  }
  return sets;
}

std::vector<ResponseSet> load_responses(const std::filesystem::path& jsonl_path) {
  std::vector<ResponseSet> sets;
  std::ifstream in(jsonl_path);
  if (!in) return sets;

  std::map<std::pair<std::string, double>, std::size_t> index;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded()) continue;
    const std::string instance_id = record.value("instance_id", "");
    const double temperature = record.value("temperature", 0.0);
    const auto key = std::make_pair(instance_id, temperature);
    auto it = index.find(key);
    if (it == index.end()) {
      ResponseSet set;
      set.instance_id = instance_id;
      set.image_ref = record.value("image_ref", "");
      set.prompt = record.value("prompt", "");
      set.temperature = temperature;
      set.backend_id = record.value("backend_id", "");
      sets.push_back(std::move(set));
      it = index.emplace(key, sets.size() - 1).first;
    }
    sets[it->second].responses.push_back(
        {record.value("text", ""), instance_id, record.value("sample_index", 0)});
  }
  // Concurrent collection appends in arrival order; normalize so every
  // consumer sees the same row order regardless of thread scheduling.
  for (ResponseSet& set : sets) {
    std::sort(set.responses.begin(), set.responses.end(),
              [](const ResponseText& a, const ResponseText& b) {
                return a.sample_index < b.sample_index;
              });
  }
  return sets;
}

MetadataLoadResult load_metadata(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& image_dir) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open metadata CSV: " + csv_path.string());

  MetadataLoadResult result;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("metadata CSV has no header row: " + csv_path.string());
  }
  const std::vector<std::string> header = split_csv_row(line);
  long filename_col = -1, finding_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "filename") filename_col = static_cast<long>(i);
    if (header[i] == "finding") finding_col = static_cast<long>(i);
  }
  if (filename_col < 0 || finding_col < 0) {
    throw std::runtime_error(
        "metadata CSV must have 'filename' and 'finding' columns");
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++result.total_data_lines;
    const std::vector<std::string> fields = split_csv_row(line);
    if (fields.size() != header.size() ||
        fields[filename_col].empty()) {
      ++result.malformed_rows;
      continue;
    }
    MetadataRecord record;
    record.filename = fields[filename_col];
    record.finding = fields[finding_col];
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<long>(i) == filename_col || static_cast<long>(i) == finding_col) {
        continue;
      }
      record.extra_fields.emplace_back(header[i], fields[i]);
    }
    record.image_missing = !std::filesystem::exists(image_dir / record.filename);
    result.records.push_back(std::move(record));
  }
  return result;
}

}  // namespace hulluq
