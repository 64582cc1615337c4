#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "crl/basis/prompts.hpp"
#include "crl/core/types.hpp"

namespace crl::basis {

struct LlmRequestConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4o";
  /// Sampling temperature in [0, 2].
  double temperature = 1.0;
  std::size_t max_retries = 3;
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t timeout_ms = 60000;
  std::size_t retry_backoff_ms = 500;
  /// Upper bound on re-prompting rounds when chasing a fixed count.
  std::size_t max_rounds = 10;

  void validate() const;
};

/// Anything that answers a single-turn prompt with text.
class ChatBackend {
public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Chat-completion endpoint client: POSTs
/// {model, messages:[{role:"user", content}], temperature} and returns the
/// first choice's message content.
class HttpChatClient final : public ChatBackend {
public:
  explicit HttpChatClient(LlmRequestConfig config);
  std::string complete(const std::string& prompt) override;
  const LlmRequestConfig& config() const noexcept { return config_; }

private:
  LlmRequestConfig config_;
};

std::string build_chat_request(const std::string& prompt, const LlmRequestConfig& config);
/// Extracts choices[0].message.content; throws ProviderContract on shape errors.
std::string parse_chat_response(const std::string& body);

struct DescriptorRequest {
  LlmPromptTemplate prompt = LlmPromptTemplate::standard();
  /// When set, rounds repeat with the fixed-count prompt until this many
  /// unique descriptors are collected (then truncated to exactly this many).
  std::optional<std::size_t> target_count;
  std::size_t max_rounds = 10;
};

/// Queries the backend for descriptors of `criterion`.
///
/// Single round without a target. With a target, descriptors are unioned
/// across rounds (first occurrence wins); rounds whose reply cannot be
/// parsed are skipped. Throws InsufficientDescriptorsError once max_rounds
/// is exhausted below the target.
std::vector<std::string> request_descriptors(const Criterion& criterion, ChatBackend& backend,
                                             const DescriptorRequest& request = {});

std::vector<std::string> request_descriptors(const Criterion& criterion,
                                             const LlmRequestConfig& config,
                                             std::optional<std::size_t> target_count);

}  // namespace crl::basis
