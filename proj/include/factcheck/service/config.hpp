#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace factcheck::service {

struct ServiceConfig {
  std::string bind_addr = "127.0.0.1:8080";  // host:port
  std::optional<std::filesystem::path> sadhan_ckpt;
  std::optional<std::filesystem::path> worthiness_ckpt;
  // Word vectors for snippet similarity; the SADHAN checkpoint's table is
  // used when unset.
  std::optional<std::filesystem::path> embeddings_path;
  std::string search_backend = "fixture";  // "fixture" or "live"
  std::string search_api_key;
  std::string search_endpoint;
  std::optional<std::filesystem::path> fixture_dir;
  std::filesystem::path feedback_log = "feedback.jsonl";
  std::string cors_origin = "*";

  // Reads BIND_ADDR, SADHAN_CKPT, WORTHINESS_CKPT, EMBEDDINGS_PATH,
  // SEARCH_BACKEND, SEARCH_API_KEY, SEARCH_ENDPOINT, FIXTURE_DIR,
  // FEEDBACK_LOG and CORS_ORIGIN. Empty values count as unset. Throws
  // std::invalid_argument for an unknown backend name.
  static ServiceConfig from_env();
  static ServiceConfig from_lookup(const std::function<std::optional<std::string>(const char*)>& lookup);
};

// Splits "host:port"; a bare port means 127.0.0.1.
std::pair<std::string, int> parse_bind_addr(const std::string& addr);

}  // namespace factcheck::service
