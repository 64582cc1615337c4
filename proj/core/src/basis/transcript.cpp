#include "crl/basis/transcript.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>

#include "crl/core/error.hpp"

namespace crl::basis {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_json_line(const TranscriptRecord& record) {
  nlohmann::json j = {{"prompt", record.prompt},
                      {"response", record.response},
                      {"timestamp", record.timestamp},
                      {"model", record.model},
                      {"temperature", record.temperature}};
  return j.dump();
}

TranscriptRecord parse_transcript_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    TranscriptRecord r;
    r.prompt = j.at("prompt").get<std::string>();
    r.response = j.at("response").get<std::string>();
    r.timestamp = j.value("timestamp", "");
    r.model = j.value("model", "");
    r.temperature = j.value("temperature", 1.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::transcript, std::string("bad transcript record: ") + e.what(),
                {{"excerpt", line.substr(0, 200)}});
  }
}

std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open transcript " + path.string());
  std::vector<TranscriptRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_transcript_line(line));
  }
  return records;
}

RecordingChatBackend::RecordingChatBackend(ChatBackend& inner, std::filesystem::path path,
                                           std::string model, double temperature)
    : inner_(inner), path_(std::move(path)), model_(std::move(model)), temperature_(temperature) {}

std::string RecordingChatBackend::complete(const std::string& prompt) {
  std::string response = inner_.complete(prompt);
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error(ErrorKind::io, "cannot append to transcript " + path_.string());
  out << to_json_line({prompt, response, utc_timestamp(), model_, temperature_}) << '\n';
  return response;
}

ReplayChatBackend::ReplayChatBackend(std::vector<TranscriptRecord> records)
    : records_(std::move(records)), used_(records_.size(), false) {}

ReplayChatBackend ReplayChatBackend::from_file(const std::filesystem::path& path) {
  return ReplayChatBackend(read_transcript(path));
}

std::string ReplayChatBackend::complete(const std::string& prompt) {
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!used_[i] && records_[i].prompt == prompt) {
      used_[i] = true;
      return records_[i].response;
    }
  }
  throw Error(ErrorKind::transcript, "transcript has no unused record for prompt",
              {{"prompt", prompt.substr(0, 200)}});
}

}  // namespace crl::basis
