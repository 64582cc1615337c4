#include "providers/http_util.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "crl/core/error.hpp"

namespace crl::net {

Endpoint split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorKind::config, "endpoint URL '" + std::string(url) + "' lacks a scheme");
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_begin)), std::string(url.substr(path_begin))};
}

std::string api_key_from_env(std::string_view var) {
  if (var.empty()) return {};
  const char* value = std::getenv(std::string(var).c_str());
  return value ? std::string(value) : std::string();
}

std::string post_json(std::string_view url, const std::string& body, const std::string& api_key,
                      const RetryPolicy& policy) {
  const Endpoint ep = split_url(url);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  auto backoff = policy.initial_backoff;
  std::string last_error;
  int last_status = 0;
  for (std::size_t attempt = 0; attempt <= policy.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(ep.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(ep.path, headers, body, "application/json");
    if (!res) {
      last_error = "request to " + std::string(url) + " failed: " + httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_status = res->status;
    last_error = "HTTP " + std::to_string(res->status) + " from " + std::string(url) + ": " +
                 res->body.substr(0, 200);
    if (res->status == 401 || res->status == 403) {
      throw TransportError("authentication rejected by " + std::string(url), res->status);
    }
    if (res->status != 429 && res->status < 500) break;
  }
  throw TransportError(last_error, last_status);
}

}  // namespace crl::net
