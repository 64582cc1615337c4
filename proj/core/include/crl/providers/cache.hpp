#pragma once

#include <array>
#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace crl::providers {

/// Content-addressed on-disk store for text embeddings.
///
/// Layout under the root:
///   shards/<2 hex>/<sha256>.crle   one-row CRLE per cached embedding
///   index.jsonl                    {key, provider, model, prompt} per insert
///
/// Entries are written to a temporary file and renamed into place, so
/// concurrent processes never observe partial shards. Within a process,
/// readers of a shard share a lock and writers hold it exclusively.
class EmbeddingCache {
public:
  explicit EmbeddingCache(std::filesystem::path root);

  /// CRL_CACHE_DIR, or ./.crl-cache when unset.
  static std::filesystem::path default_root();
  static std::string make_key(std::string_view provider, std::string_view model,
                              std::string_view prompt);

  std::optional<std::vector<float>> get(const std::string& key) const;
  void put(const std::string& key, const std::vector<float>& embedding, std::string_view provider,
           std::string_view model, std::string_view prompt);

  const std::filesystem::path& root() const noexcept { return root_; }

private:
  std::filesystem::path shard_path(const std::string& key) const;
  std::shared_mutex& shard_mutex(const std::string& key) const;

  std::filesystem::path root_;
  mutable std::array<std::shared_mutex, 256> shard_mutexes_;
  std::mutex index_mutex_;
};

}  // namespace crl::providers
