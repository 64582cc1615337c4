#include "crl/providers/embed_client.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <unordered_map>

#include "crl/core/error.hpp"
#include "crl/core/parallel.hpp"
#include "providers/http_util.hpp"

namespace crl::providers {

void EmbedProviderConfig::validate() const {
  if (batch_size < 1) throw Error(ErrorKind::config, "embedding batch_size must be at least 1");
  if (parallel_batches < 1) throw Error(ErrorKind::config, "parallel_batches must be at least 1");
}

std::string build_embedding_request(const std::vector<std::string>& inputs, const std::string& model) {
  return nlohmann::json{{"model", model}, {"input", inputs}}.dump();
}

std::vector<std::vector<float>> parse_embedding_response(const std::string& body) {
  try {
    const auto doc = nlohmann::json::parse(body);
    const auto& data = doc.at("data");
    std::vector<std::vector<float>> rows(data.size());
    std::vector<bool> filled(data.size(), false);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t slot = data[i].contains("index") ? data[i].at("index").get<std::size_t>() : i;
      if (slot >= rows.size() || filled[slot]) {
        throw Error(ErrorKind::provider_contract, "embedding response has bad index " + std::to_string(slot));
      }
      rows[slot] = data[i].at("embedding").get<std::vector<float>>();
      filled[slot] = true;
    }
    return rows;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::provider_contract, std::string("malformed embedding response: ") + e.what(),
                {{"excerpt", body.substr(0, 200)}});
  }
}

HttpEmbedTransport::HttpEmbedTransport(EmbedProviderConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::vector<std::vector<float>> HttpEmbedTransport::embed_batch(const std::vector<std::string>& inputs) {
  net::RetryPolicy policy;
  policy.max_retries = config_.max_retries;
  policy.initial_backoff = std::chrono::milliseconds(config_.retry_backoff_ms);
  policy.timeout = std::chrono::milliseconds(config_.timeout_ms);
  return parse_embedding_response(net::post_json(config_.endpoint_url,
                                                 build_embedding_request(inputs, config_.model_name),
                                                 net::api_key_from_env(config_.api_key_env), policy));
}

EmbeddingService::EmbeddingService(std::shared_ptr<EmbedTransport> transport, EmbedProviderConfig config,
                                   std::shared_ptr<EmbeddingCache> cache)
    : transport_(std::move(transport)), config_(std::move(config)), cache_(std::move(cache)) {
  config_.validate();
}

std::string EmbeddingService::provider_id() const {
  return transport_->provider_id() + "#" + config_.model_name;
}

EmbeddingMatrix EmbeddingService::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::invalid_value, "no texts to embed");
  const std::string provider = transport_->provider_id();

  std::unordered_map<std::string, std::vector<float>> resolved;
  std::vector<std::string> misses;
  std::vector<std::string> miss_keys;
  for (const auto& text : texts) {
    if (resolved.count(text)) continue;
    std::optional<std::vector<float>> hit;
    const std::string key = EmbeddingCache::make_key(provider, config_.model_name, text);
    if (cache_) hit = cache_->get(key);
    if (hit) {
      resolved.emplace(text, std::move(*hit));
    } else if (std::find(misses.begin(), misses.end(), text) == misses.end()) {
      misses.push_back(text);
      miss_keys.push_back(key);
    }
  }

  const std::size_t n_batches = (misses.size() + config_.batch_size - 1) / config_.batch_size;
  std::vector<std::vector<std::vector<float>>> results(n_batches);
  parallel_for(
      n_batches,
      [&](std::size_t b) {
        const auto begin = misses.begin() + static_cast<std::ptrdiff_t>(b * config_.batch_size);
        const auto end = misses.begin() +
                         static_cast<std::ptrdiff_t>(std::min(misses.size(), (b + 1) * config_.batch_size));
        std::vector<std::string> batch(begin, end);
        ++batches_sent_;
        results[b] = transport_->embed_batch(batch);
        if (results[b].size() != batch.size()) {
          throw Error(ErrorKind::provider_contract,
                      "provider returned " + std::to_string(results[b].size()) + " embeddings for " +
                          std::to_string(batch.size()) + " inputs",
                      {{"expected", static_cast<std::int64_t>(batch.size())},
                       {"received", static_cast<std::int64_t>(results[b].size())}});
        }
      },
      config_.parallel_batches);

  for (std::size_t b = 0; b < n_batches; ++b) {
    for (std::size_t i = 0; i < results[b].size(); ++i) {
      const std::size_t m = b * config_.batch_size + i;
      if (cache_) cache_->put(miss_keys[m], results[b][i], provider, config_.model_name, misses[m]);
      resolved.emplace(misses[m], std::move(results[b][i]));
    }
  }

  const std::size_t dims = resolved.at(texts.front()).size();
  std::vector<float> data;
  data.reserve(texts.size() * dims);
  for (const auto& text : texts) {
    const auto& v = resolved.at(text);
    if (v.size() != dims) {
      throw Error(ErrorKind::provider_contract,
                  "provider returned embeddings of differing widths (" + std::to_string(dims) + " vs " +
                      std::to_string(v.size()) + ")");
    }
    data.insert(data.end(), v.begin(), v.end());
  }
  return EmbeddingMatrix(texts.size(), dims, std::move(data));
}

EmbeddingMatrix embed_texts(std::span<const std::string> prompts, const EmbedProviderConfig& config) {
  auto transport = std::make_shared<HttpEmbedTransport>(config);
  auto cache = std::make_shared<EmbeddingCache>(EmbeddingCache::default_root());
  EmbeddingService service(std::move(transport), config, std::move(cache));
  return service.embed(prompts);
}

}  // namespace crl::providers
