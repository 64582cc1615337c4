#include "crl/basis/llm_client.hpp"

#include <nlohmann/json.hpp>

#include "crl/basis/descriptors.hpp"
#include "crl/core/error.hpp"
#include "providers/http_util.hpp"

namespace crl::basis {

void LlmRequestConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorKind::config, "temperature must lie in [0, 2], got " + std::to_string(temperature));
  }
  if (max_rounds < 1) throw Error(ErrorKind::config, "max_rounds must be at least 1");
}

std::string build_chat_request(const std::string& prompt, const LlmRequestConfig& config) {
  nlohmann::json req = {
      {"model", config.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config.temperature},
  };
  return req.dump();
}

std::string parse_chat_response(const std::string& body) {
  try {
    const auto doc = nlohmann::json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::provider_contract,
                std::string("malformed chat completion response: ") + e.what(),
                {{"excerpt", body.substr(0, 200)}});
  }
}

HttpChatClient::HttpChatClient(LlmRequestConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::string HttpChatClient::complete(const std::string& prompt) {
  net::RetryPolicy policy;
  policy.max_retries = config_.max_retries;
  policy.initial_backoff = std::chrono::milliseconds(config_.retry_backoff_ms);
  policy.timeout = std::chrono::milliseconds(config_.timeout_ms);
  const std::string body =
      net::post_json(config_.endpoint_url, build_chat_request(prompt, config_),
                     net::api_key_from_env(config_.api_key_env), policy);
  return parse_chat_response(body);
}

std::vector<std::string> request_descriptors(const Criterion& criterion, ChatBackend& backend,
                                             const DescriptorRequest& request) {
  criterion.validate();
  if (!request.target_count) {
    return parse_descriptor_list(backend.complete(render_llm_prompt(criterion, request.prompt)));
  }
  const std::size_t target = *request.target_count;
  if (target < 1) throw Error(ErrorKind::config, "target descriptor count must be at least 1");
  if (request.max_rounds < 1) throw Error(ErrorKind::config, "max_rounds must be at least 1");

  const std::string prompt = render_llm_prompt(criterion, LlmPromptTemplate::fixed(target));
  std::vector<std::string> collected;
  for (std::size_t round = 0; round < request.max_rounds; ++round) {
    try {
      merge_unique(collected, parse_descriptor_list(backend.complete(prompt)));
    } catch (const ParseError&) {
      continue;
    }
    if (collected.size() >= target) {
      collected.resize(target);
      return collected;
    }
  }
  throw InsufficientDescriptorsError(collected.size(), target, request.max_rounds);
}

std::vector<std::string> request_descriptors(const Criterion& criterion,
                                             const LlmRequestConfig& config,
                                             std::optional<std::size_t> target_count) {
  HttpChatClient client(config);
  DescriptorRequest request;
  request.target_count = target_count;
  request.max_rounds = config.max_rounds;
  return request_descriptors(criterion, client, request);
}

}  // namespace crl::basis
