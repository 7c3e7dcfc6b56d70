#include "factcheck/service/feedback.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace factcheck::service {

using nlohmann::json;

std::string_view to_string(FeedbackKind kind) {
  return kind == FeedbackKind::kVerdict ? "verdict" : "claim_score";
}

FeedbackKind parse_feedback_kind(std::string_view s) {
  if (s == "verdict") return FeedbackKind::kVerdict;
  if (s == "claim_score") return FeedbackKind::kClaimScore;
  throw std::invalid_argument("feedback kind must be 'verdict' or 'claim_score', got '" + std::string(s) + "'");
}

json to_json(const FeedbackRecord& r) {
  json j = {{"request_id", r.request_id},
            {"kind", std::string(to_string(r.kind))},
            {"agree", r.agree},
            {"timestamp", r.timestamp},
            {"claim_text", r.claim_text}};
  j["text"] = r.text ? json(*r.text) : json(nullptr);
  return j;
}

FeedbackRecord feedback_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("feedback must be a JSON object");
  auto need_string = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string()) throw std::invalid_argument(std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  FeedbackRecord r;
  r.request_id = need_string("request_id");
  if (r.request_id.empty()) throw std::invalid_argument("'request_id' must not be empty");
  r.kind = parse_feedback_kind(need_string("kind"));
  if (!j.contains("agree") || !j["agree"].is_boolean()) throw std::invalid_argument("'agree' must be a boolean");
  r.agree = j["agree"].get<bool>();
  if (j.contains("text") && !j["text"].is_null()) {
    if (!j["text"].is_string()) throw std::invalid_argument("'text' must be a string or null");
    r.text = j["text"].get<std::string>();
  }
  if (j.contains("timestamp") && j["timestamp"].is_string()) r.timestamp = j["timestamp"].get<std::string>();
  if (j.contains("claim_text") && j["claim_text"].is_string()) r.claim_text = j["claim_text"].get<std::string>();
  return r;
}

FeedbackLog::FeedbackLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

void FeedbackLog::append(const FeedbackRecord& record) {
  const std::string line = to_json(record).dump() + "\n";
  std::lock_guard lock(mutex_);
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "open " + path_.string());
  std::size_t done = 0;
  int err = 0;
  // One write normally suffices; the loop only matters for short writes.
  while (done < line.size()) {
    const ssize_t n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      err = errno;
      break;
    }
    done += static_cast<std::size_t>(n);
  }
  if (!err && ::fsync(fd) != 0) err = errno;
  ::close(fd);
  if (err) throw std::system_error(err, std::generic_category(), "append " + path_.string());
}

std::vector<FeedbackRecord> FeedbackLog::read_all(const std::filesystem::path& path) {
  std::vector<FeedbackRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(feedback_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace factcheck::service
