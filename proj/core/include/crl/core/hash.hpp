#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace crl {

/// Incremental SHA-256. Fields fed through `field()` are length-prefixed so
/// concatenation boundaries cannot collide.
class Sha256 {
public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const unsigned char> bytes);
  Sha256& update(std::string_view text);
  Sha256& field(std::string_view text);
  std::string hex_digest();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(std::string_view text);

}  // namespace crl
