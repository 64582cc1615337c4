#include "crl/providers/crle.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <vector>

#include "crl/core/error.hpp"

namespace crl::providers {
namespace {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(static_cast<unsigned char>(value & 0xff)));
    value = static_cast<T>(value >> 8);
  }
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) {
    value = static_cast<T>((value << 8) | static_cast<unsigned char>(bytes[offset + i]));
  }
  return value;
}

}  // namespace

std::string encode_crle(const EmbeddingMatrix& m) {
  if (m.dims() > std::numeric_limits<std::uint32_t>::max()) {
    throw ShapeError("matrix too wide for CRLE: " + m.shape_string());
  }
  std::string out;
  out.reserve(kCrleHeaderSize + m.data().size() * 4);
  out.append("CRLE", 4);
  put_le<std::uint16_t>(out, kCrleVersion);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dims()));
  for (float v : m.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingMatrix decode_crle(std::string_view bytes) {
  if (bytes.size() < 4) throw FormatError("file shorter than CRLE magic", bytes.size());
  if (bytes.substr(0, 4) != "CRLE") throw FormatError("bad CRLE magic", 0);
  if (bytes.size() < kCrleHeaderSize) throw FormatError("truncated CRLE header", bytes.size());
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kCrleVersion) {
    throw FormatError("unsupported CRLE version " + std::to_string(version), 4);
  }
  const auto rows = get_le<std::uint64_t>(bytes, 6);
  const auto dims = get_le<std::uint32_t>(bytes, 14);
  const std::uint64_t payload = bytes.size() - kCrleHeaderSize;
  if (dims == 0 && rows > (std::uint64_t{1} << 32)) {
    throw FormatError("implausible row count " + std::to_string(rows) + " for zero-width matrix", 6);
  }
  if (dims != 0 && rows > payload / 4 / dims) {
    throw FormatError("CRLE payload truncated: header declares " + std::to_string(rows) + "x" +
                          std::to_string(dims) + " but only " + std::to_string(payload) +
                          " payload bytes present",
                      bytes.size());
  }
  const std::uint64_t expected = rows * dims * 4ull;
  if (payload != expected) {
    throw FormatError("CRLE payload length " + std::to_string(payload) + " differs from expected " +
                          std::to_string(expected),
                      kCrleHeaderSize + std::min(payload, expected));
  }
  std::vector<float> data(rows * dims);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, kCrleHeaderSize + 4 * i));
    if (!std::isfinite(data[i])) throw FormatError("non-finite payload value", kCrleHeaderSize + 4 * i);
  }
  return EmbeddingMatrix(rows, dims, std::move(data));
}

void write_crle(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  const std::string bytes = encode_crle(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "short write to " + path.string());
}

EmbeddingMatrix read_crle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_crle(bytes);
}

}  // namespace crl::providers
