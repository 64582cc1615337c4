#include "crl/core/error.hpp"

namespace crl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::shape: return "shape_error";
    case ErrorKind::format: return "format_error";
    case ErrorKind::parse: return "parse_error";
    case ErrorKind::invalid_value: return "invalid_value";
    case ErrorKind::config: return "config_error";
    case ErrorKind::consistency: return "consistency_error";
    case ErrorKind::transport: return "transport_error";
    case ErrorKind::provider_contract: return "provider_contract_error";
    case ErrorKind::transcript: return "transcript_error";
    case ErrorKind::insufficient_descriptors: return "insufficient_descriptors";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::insufficient_class: return "insufficient_class";
    case ErrorKind::degenerate_training: return "degenerate_training";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::undefined_ap: return "undefined_ap";
    case ErrorKind::io: return "io_error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::map<std::string, ErrorDetail> details)
    : std::runtime_error(message), kind_(kind), details_(std::move(details)) {}

FormatError::FormatError(const std::string& message, std::uint64_t offset)
    : Error(ErrorKind::format, message + " (at byte offset " + std::to_string(offset) + ")",
            {{"offset", static_cast<std::int64_t>(offset)}}),
      offset_(offset) {}

ParseError::ParseError(const std::string& message, std::string excerpt)
    : Error(ErrorKind::parse, message, {{"excerpt", excerpt}}), excerpt_(std::move(excerpt)) {}

TransportError::TransportError(const std::string& message, int status)
    : Error(ErrorKind::transport, message, {{"status", static_cast<std::int64_t>(status)}}),
      status_(status) {}

InsufficientDescriptorsError::InsufficientDescriptorsError(std::size_t achieved,
                                                           std::size_t target,
                                                           std::size_t rounds)
    : Error(ErrorKind::insufficient_descriptors,
            "collected " + std::to_string(achieved) + " unique descriptors, needed " +
                std::to_string(target) + " after " + std::to_string(rounds) + " rounds",
            {{"achieved", static_cast<std::int64_t>(achieved)},
             {"target", static_cast<std::int64_t>(target)},
             {"rounds", static_cast<std::int64_t>(rounds)}}),
      achieved_(achieved),
      target_(target) {}

DivergenceError::DivergenceError(std::size_t epoch)
    : Error(ErrorKind::divergence, "loss became non-finite at epoch " + std::to_string(epoch),
            {{"epoch", static_cast<std::int64_t>(epoch)}}),
      epoch_(epoch) {}

}  // namespace crl
