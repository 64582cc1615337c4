#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crl/core/matrix.hpp"
#include "crl/providers/cache.hpp"

namespace crl::providers {

/// Text encoder as seen by basis construction: row i of the result encodes
/// texts[i].
class TextEmbedder {
public:
  virtual ~TextEmbedder() = default;
  virtual EmbeddingMatrix embed(std::span<const std::string> texts) = 0;
  virtual std::string provider_id() const = 0;
};

struct EmbedProviderConfig {
  std::string endpoint_url = "https://api.openai.com/v1/embeddings";
  std::string model_name = "text-embedding-3-small";
  std::size_t batch_size = 64;
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t timeout_ms = 30000;
  std::size_t max_retries = 3;
  std::size_t retry_backoff_ms = 500;
  /// Concurrent in-flight batches.
  std::size_t parallel_batches = 2;

  void validate() const;
};

/// One network round trip: a batch of inputs to index-aligned vectors.
class EmbedTransport {
public:
  virtual ~EmbedTransport() = default;
  virtual std::vector<std::vector<float>> embed_batch(const std::vector<std::string>& inputs) = 0;
  virtual std::string provider_id() const = 0;
};

/// POSTs {model, input:[...]} and reads {data:[{embedding:[...]}, ...]}.
class HttpEmbedTransport final : public EmbedTransport {
public:
  explicit HttpEmbedTransport(EmbedProviderConfig config);
  std::vector<std::vector<float>> embed_batch(const std::vector<std::string>& inputs) override;
  std::string provider_id() const override { return config_.endpoint_url; }

private:
  EmbedProviderConfig config_;
};

std::string build_embedding_request(const std::vector<std::string>& inputs, const std::string& model);
/// Orders `data` by its optional `index` field; throws ProviderContract on
/// malformed bodies.
std::vector<std::vector<float>> parse_embedding_response(const std::string& body);

/// Batching, caching front end over a transport.
class EmbeddingService final : public TextEmbedder {
public:
  EmbeddingService(std::shared_ptr<EmbedTransport> transport, EmbedProviderConfig config,
                   std::shared_ptr<EmbeddingCache> cache = nullptr);

  EmbeddingMatrix embed(std::span<const std::string> texts) override;
  std::string provider_id() const override;

  /// Transport calls issued so far.
  std::size_t batches_sent() const noexcept { return batches_sent_.load(); }

private:
  std::shared_ptr<EmbedTransport> transport_;
  EmbedProviderConfig config_;
  std::shared_ptr<EmbeddingCache> cache_;
  std::atomic<std::size_t> batches_sent_{0};
};

/// HTTP transport plus the cache under EmbeddingCache::default_root().
EmbeddingMatrix embed_texts(std::span<const std::string> prompts, const EmbedProviderConfig& config);

}  // namespace crl::providers
