#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "crl/basis/llm_client.hpp"

namespace crl::basis {

/// One LLM exchange; persisted as a JSON line.
struct TranscriptRecord {
  std::string prompt;
  std::string response;
  std::string timestamp;  // ISO-8601 UTC
  std::string model;
  double temperature = 1.0;
};

std::string to_json_line(const TranscriptRecord& record);
TranscriptRecord parse_transcript_line(const std::string& line);
std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path);

/// Forwards to another backend and appends each exchange to a transcript.
class RecordingChatBackend final : public ChatBackend {
public:
  RecordingChatBackend(ChatBackend& inner, std::filesystem::path path, std::string model,
                       double temperature);
  std::string complete(const std::string& prompt) override;

private:
  ChatBackend& inner_;
  std::filesystem::path path_;
  std::string model_;
  double temperature_;
  std::mutex mutex_;
};

/// Answers prompts from a recorded transcript. Records with the same prompt
/// are consumed in file order; a prompt with no remaining record throws a
/// transcript error.
class ReplayChatBackend final : public ChatBackend {
public:
  explicit ReplayChatBackend(std::vector<TranscriptRecord> records);
  static ReplayChatBackend from_file(const std::filesystem::path& path);
  std::string complete(const std::string& prompt) override;

private:
  std::vector<TranscriptRecord> records_;
  std::vector<bool> used_;
  std::mutex mutex_;
};

std::string utc_timestamp();

}  // namespace crl::basis
