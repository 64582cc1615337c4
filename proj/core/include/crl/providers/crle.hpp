#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "crl/core/matrix.hpp"

namespace crl::providers {

/// CRLE binary layout (all little-endian):
///
///   offset  size  field
///   0       4     magic "CRLE"
///   4       2     version (u16) = 1
///   6       8     rows (u64)
///   14      4     dims (u32)
///   18      4*r*d payload, IEEE-754 binary32, row-major
///
/// Row ids are not stored; they travel in the manifest.
inline constexpr std::uint16_t kCrleVersion = 1;
inline constexpr std::size_t kCrleHeaderSize = 18;

std::string encode_crle(const EmbeddingMatrix& m);
EmbeddingMatrix decode_crle(std::string_view bytes);

void write_crle(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_crle(const std::filesystem::path& path);

}  // namespace crl::providers
