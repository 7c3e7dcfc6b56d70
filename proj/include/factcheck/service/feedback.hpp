#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace factcheck::service {

enum class FeedbackKind { kVerdict, kClaimScore };

std::string_view to_string(FeedbackKind kind);
// "verdict" or "claim_score"; throws std::invalid_argument otherwise.
FeedbackKind parse_feedback_kind(std::string_view s);

struct FeedbackRecord {
  std::string request_id;
  FeedbackKind kind = FeedbackKind::kVerdict;
  bool agree = false;
  std::optional<std::string> text;
  std::string timestamp;  // ISO-8601 UTC
  std::string claim_text;

  bool operator==(const FeedbackRecord&) const = default;
};

nlohmann::json to_json(const FeedbackRecord& r);
// Throws std::invalid_argument on missing or mistyped fields.
FeedbackRecord feedback_from_json(const nlohmann::json& j);

// Append-only JSON-lines file. Each record is written with a single
// write(2) on an O_APPEND descriptor and fsync'd before append() returns;
// appends from one process are additionally serialised by a mutex.
class FeedbackLog {
 public:
  explicit FeedbackLog(std::filesystem::path path);

  void append(const FeedbackRecord& record);
  const std::filesystem::path& path() const { return path_; }

  // Parses every line; throws std::invalid_argument naming a bad line.
  static std::vector<FeedbackRecord> read_all(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace factcheck::service
