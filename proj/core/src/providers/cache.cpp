#include "crl/providers/cache.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "crl/core/error.hpp"
#include "crl/core/hash.hpp"
#include "crl/providers/crle.hpp"

namespace crl::providers {

EmbeddingCache::EmbeddingCache(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_ / "shards", ec);
  if (ec) throw Error(ErrorKind::io, "cannot create cache directory " + root_.string() + ": " + ec.message());
}

std::filesystem::path EmbeddingCache::default_root() {
  const char* env = std::getenv("CRL_CACHE_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path(".crl-cache");
}

std::string EmbeddingCache::make_key(std::string_view provider, std::string_view model,
                                     std::string_view prompt) {
  return Sha256().field("crl-embed-v1").field(provider).field(model).field(prompt).hex_digest();
}

std::filesystem::path EmbeddingCache::shard_path(const std::string& key) const {
  return root_ / "shards" / key.substr(0, 2) / (key + ".crle");
}

std::shared_mutex& EmbeddingCache::shard_mutex(const std::string& key) const {
  return shard_mutexes_[std::stoul(key.substr(0, 2), nullptr, 16)];
}

std::optional<std::vector<float>> EmbeddingCache::get(const std::string& key) const {
  std::shared_lock lock(shard_mutex(key));
  const auto path = shard_path(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  const auto m = read_crle(path);
  if (m.rows() != 1) throw FormatError("cache shard " + path.string() + " must hold one row", 6);
  return std::vector<float>(m.data().begin(), m.data().end());
}

void EmbeddingCache::put(const std::string& key, const std::vector<float>& embedding,
                         std::string_view provider, std::string_view model,
                         std::string_view prompt) {
  static std::atomic<unsigned long> counter{0};
  {
    std::unique_lock lock(shard_mutex(key));
    const auto path = shard_path(key);
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
           std::to_string(counter++);
    write_crle(EmbeddingMatrix(1, embedding.size(), embedding), tmp);
    std::filesystem::rename(tmp, path);
  }
  std::lock_guard lock(index_mutex_);
  std::ofstream index(root_ / "index.jsonl", std::ios::app);
  index << nlohmann::json{{"key", key}, {"provider", provider}, {"model", model}, {"prompt", prompt}}.dump()
        << '\n';
}

}  // namespace crl::providers
