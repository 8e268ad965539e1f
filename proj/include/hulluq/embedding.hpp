#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hulluq {

/// One sampled response. Empty text is legal and still gets embedded.
struct ResponseText {
  std::string text;
  std::string instance_id;
  int sample_index = 0;
};

struct EmbeddingVector {
  std::vector<double> values;
  std::string backend_id;

  std::size_t dimension() const { return values.size(); }
};

/// Batch text-to-vector backend. Implementations must be order
/// preserving and return one vector per input, all the same dimension.
class EmbedderBackend {
 public:
  virtual ~EmbedderBackend() = default;
  virtual std::string id() const = 0;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

/// Deterministic signed feature hashing of character 3-grams, L2
/// normalized (the zero vector for empty text stays zero). An offline
/// stand-in for a pretrained sentence encoder: similar texts land near
/// each other, texts with disjoint 3-gram sets are near-orthogonal.
EmbeddingVector local_hash_embed(const ResponseText& text, int dimension);

class LocalHashEmbedder final : public EmbedderBackend {
 public:
  explicit LocalHashEmbedder(int dimension = 256);
  std::string id() const override;
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

 private:
  int dimension_;
};

/// Client for the common embeddings-API shape:
///   POST {"input": [texts], "model": name} -> {"data": [{"embedding": [...]}]}
/// Auth token comes from the HULLUQ_EMBED_TOKEN env var when set.
class RemoteEmbedder final : public EmbedderBackend {
 public:
  RemoteEmbedder(std::string base_url, std::string model,
                 int max_retries = 3, int timeout_seconds = 30);
  std::string id() const override;
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

 private:
  std::string base_url_;
  std::string model_;
  int max_retries_;
  int timeout_seconds_;
};

/// Disk cache of embeddings keyed by (backend_id, content hash); one
/// JSON record per vector under a content-addressed path.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path root);
  std::optional<std::vector<double>> lookup(const std::string& backend_id,
                                            const std::string& text) const;
  void store(const std::string& backend_id, const std::string& text,
             const std::vector<double>& values) const;

 private:
  std::filesystem::path path_for(const std::string& backend_id,
                                 const std::string& text) const;
  std::filesystem::path root_;
};

/// Embed a batch of responses through `backend`, order preserving,
/// optionally via a cache. Throws on dimension drift between texts and
/// annotates backend failures with the offending instance_id.
std::vector<EmbeddingVector> embed_batch(const std::vector<ResponseText>& texts,
                                         EmbedderBackend& backend,
                                         EmbeddingCache* cache = nullptr,
                                         int batch_size = 16);

/// 64-bit FNV-1a, the project-wide content hash.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace hulluq
