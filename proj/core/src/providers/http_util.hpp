#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>

namespace crl::net {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'
};

Endpoint split_url(std::string_view url);

struct RetryPolicy {
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds timeout{60000};
};

/// Reads the API key from the named environment variable; empty if unset.
std::string api_key_from_env(std::string_view var);

/// POSTs a JSON body and returns the response body. Connection failures,
/// 429 and 5xx are retried with exponential backoff; other non-2xx
/// statuses fail immediately. Throws TransportError.
std::string post_json(std::string_view url, const std::string& body, const std::string& api_key,
                      const RetryPolicy& policy);

}  // namespace crl::net
