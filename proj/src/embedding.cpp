#include "hulluq/embedding.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace hulluq {

namespace {

// Pinned hashing seed; changing it invalidates golden fixtures.
constexpr std::uint64_t kGramSeed = 0x8f3a1c5b9d2e7041ull;

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

EmbeddingVector local_hash_embed(const ResponseText& text, int dimension) {
  if (dimension < 2) throw std::invalid_argument("dimension too small");
  EmbeddingVector out;
  out.backend_id = "local-hash-" + std::to_string(dimension);
  out.values.assign(static_cast<std::size_t>(dimension), 0.0);

  const std::string& s = text.text;
  if (s.empty()) return out;  // empty text -> zero vector, by convention

  auto add_gram = [&](std::string_view gram) {
    const std::uint64_t h = fnv1a64(gram, kGramSeed);
    const std::size_t bucket = (h & ~(1ull << 63)) % static_cast<std::uint64_t>(dimension);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    out.values[bucket] += sign;
  };

  if (s.size() < 3) {
    add_gram(s);
  } else {
    for (std::size_t i = 0; i + 3 <= s.size(); ++i) {
      add_gram(std::string_view(s).substr(i, 3));
    }
  }

  double norm2 = 0.0;
  for (double v : out.values) norm2 += v * v;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : out.values) v *= inv;
  }
  return out;
}

LocalHashEmbedder::LocalHashEmbedder(int dimension) : dimension_(dimension) {
  if (dimension < 2) throw std::invalid_argument("dimension too small");
}

std::string LocalHashEmbedder::id() const {
  return "local-hash-" + std::to_string(dimension_);
}

std::vector<std::vector<double>> LocalHashEmbedder::embed(
    const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    out.push_back(local_hash_embed({t, "", 0}, dimension_).values);
  }
  return out;
}

RemoteEmbedder::RemoteEmbedder(std::string base_url, std::string model,
                               int max_retries, int timeout_seconds)
    : base_url_(std::move(base_url)),
      model_(std::move(model)),
      max_retries_(max_retries),
      timeout_seconds_(timeout_seconds) {}

std::string RemoteEmbedder::id() const { return "remote-" + model_; }

std::vector<std::vector<double>> RemoteEmbedder::embed(
    const std::vector<std::string>& texts) {
  nlohmann::json body;
  body["input"] = texts;
  body["model"] = model_;

  httplib::Client client(base_url_);
  client.set_read_timeout(timeout_seconds_, 0);
  httplib::Headers headers;
  if (const char* token = std::getenv("HULLUQ_EMBED_TOKEN")) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < max_retries_; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
    }
    auto res = client.Post("/v1/embeddings", headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("data")) {
      last_error = "malformed response body";
      continue;
    }
    std::vector<std::vector<double>> out;
    for (const auto& item : parsed["data"]) {
      out.push_back(item.at("embedding").get<std::vector<double>>());
    }
    if (out.size() != texts.size()) {
      throw std::runtime_error("embedding count mismatch: sent " +
                               std::to_string(texts.size()) + ", got " +
                               std::to_string(out.size()));
    }
    return out;
  }
  throw std::runtime_error("remote embedder unreachable after " +
                           std::to_string(max_retries_) + " attempts (" +
                           last_error + ")");
}

EmbeddingCache::EmbeddingCache(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::filesystem::path EmbeddingCache::path_for(const std::string& backend_id,
                                               const std::string& text) const {
  const std::uint64_t h = fnv1a64(text, fnv1a64(backend_id));
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.json",
                static_cast<unsigned long long>(h));
  return root_ / backend_id / name;
}

std::optional<std::vector<double>> EmbeddingCache::lookup(
    const std::string& backend_id, const std::string& text) const {
  const auto path = path_for(backend_id, text);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  auto record = nlohmann::json::parse(in, nullptr, false);
  if (record.is_discarded()) return std::nullopt;
  // Hash collision guard: the record stores the original text.
  if (record.value("text", std::string()) != text) return std::nullopt;
  return record.at("embedding").get<std::vector<double>>();
}

void EmbeddingCache::store(const std::string& backend_id, const std::string& text,
                           const std::vector<double>& values) const {
  const auto path = path_for(backend_id, text);
  std::filesystem::create_directories(path.parent_path());
  nlohmann::json record;
  record["backend_id"] = backend_id;
  record["text"] = text;
  record["embedding"] = values;
  std::ofstream out(path);
  out << record.dump();
}

std::vector<EmbeddingVector> embed_batch(const std::vector<ResponseText>& texts,
                                         EmbedderBackend& backend,
                                         EmbeddingCache* cache, int batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  const std::string backend_id = backend.id();

  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::size_t> misses;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out[i].backend_id = backend_id;
    if (cache) {
      if (auto hit = cache->lookup(backend_id, texts[i].text)) {
        out[i].values = std::move(*hit);
        continue;
      }
    }
    misses.push_back(i);
  }

  for (std::size_t start = 0; start < misses.size(); start += batch_size) {
    const std::size_t end = std::min(misses.size(), start + batch_size);
    std::vector<std::string> chunk;
    chunk.reserve(end - start);
    for (std::size_t k = start; k < end; ++k) chunk.push_back(texts[misses[k]].text);

    std::vector<std::vector<double>> vectors;
    try {
      vectors = backend.embed(chunk);
    } catch (const std::exception& e) {
      throw std::runtime_error("embedding failed for instance '" +
                               texts[misses[start]].instance_id + "': " + e.what());
    }
    if (vectors.size() != chunk.size()) {
      throw std::runtime_error("backend returned wrong number of vectors");
    }
    for (std::size_t k = start; k < end; ++k) {
      out[misses[k]].values = std::move(vectors[k - start]);
      if (cache) cache->store(backend_id, texts[misses[k]].text, out[misses[k]].values);
    }
  }

  std::size_t dim = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (double v : out[i].values) {
      if (!std::isfinite(v)) throw std::runtime_error("non-finite embedding entry");
    }
    if (i == 0) {
      dim = out[i].values.size();
    } else if (out[i].values.size() != dim) {
      throw std::runtime_error("inconsistent embedding dimension");
    }
  }
  return out;
}

}  // namespace hulluq
