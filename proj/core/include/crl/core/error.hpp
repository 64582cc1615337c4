#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace crl {

enum class ErrorKind {
  shape,
  format,
  parse,
  invalid_value,
  config,
  consistency,
  transport,
  provider_contract,
  transcript,
  insufficient_descriptors,
  insufficient_data,
  insufficient_class,
  degenerate_training,
  divergence,
  undefined_ap,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

using ErrorDetail = std::variant<std::int64_t, double, std::string>;

/// Base of every error raised by the library. `kind()` is stable and
/// machine-readable; `details()` carries structured context (counts,
/// offsets, names) for diagnostics.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message,
        std::map<std::string, ErrorDetail> details = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::map<std::string, ErrorDetail>& details() const noexcept { return details_; }

private:
  ErrorKind kind_;
  std::map<std::string, ErrorDetail> details_;
};

class ShapeError : public Error {
public:
  explicit ShapeError(const std::string& message,
                      std::map<std::string, ErrorDetail> details = {})
      : Error(ErrorKind::shape, message, std::move(details)) {}
};

class FormatError : public Error {
public:
  FormatError(const std::string& message, std::uint64_t offset);
  std::uint64_t offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& message, std::string excerpt);
  const std::string& excerpt() const noexcept { return excerpt_; }

private:
  std::string excerpt_;
};

class TransportError : public Error {
public:
  explicit TransportError(const std::string& message, int status = 0);
  int status() const noexcept { return status_; }

private:
  int status_;
};

class InsufficientDescriptorsError : public Error {
public:
  InsufficientDescriptorsError(std::size_t achieved, std::size_t target, std::size_t rounds);
  std::size_t achieved() const noexcept { return achieved_; }
  std::size_t target() const noexcept { return target_; }

private:
  std::size_t achieved_;
  std::size_t target_;
};

class DivergenceError : public Error {
public:
  explicit DivergenceError(std::size_t epoch);
  std::size_t epoch() const noexcept { return epoch_; }

private:
  std::size_t epoch_;
};

}  // namespace crl
