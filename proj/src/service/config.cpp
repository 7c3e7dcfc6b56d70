#include "factcheck/service/config.hpp"

#include <cstdlib>
#include <stdexcept>

namespace factcheck::service {

ServiceConfig ServiceConfig::from_lookup(const std::function<std::optional<std::string>(const char*)>& lookup) {
  auto get = [&](const char* name) -> std::optional<std::string> {
    auto v = lookup(name);
    if (v && v->empty()) return std::nullopt;
    return v;
  };
  ServiceConfig c;
  if (auto v = get("BIND_ADDR")) c.bind_addr = *v;
  if (auto v = get("SADHAN_CKPT")) c.sadhan_ckpt = *v;
  if (auto v = get("WORTHINESS_CKPT")) c.worthiness_ckpt = *v;
  if (auto v = get("EMBEDDINGS_PATH")) c.embeddings_path = *v;
  if (auto v = get("SEARCH_BACKEND")) c.search_backend = *v;
  if (auto v = get("SEARCH_API_KEY")) c.search_api_key = *v;
  if (auto v = get("SEARCH_ENDPOINT")) c.search_endpoint = *v;
  if (auto v = get("FIXTURE_DIR")) c.fixture_dir = *v;
  if (auto v = get("FEEDBACK_LOG")) c.feedback_log = *v;
  if (auto v = get("CORS_ORIGIN")) c.cors_origin = *v;
  if (c.search_backend != "fixture" && c.search_backend != "live")
    throw std::invalid_argument("SEARCH_BACKEND must be 'fixture' or 'live', got '" + c.search_backend + "'");
  return c;
}

ServiceConfig ServiceConfig::from_env() {
  return from_lookup([](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  });
}

std::pair<std::string, int> parse_bind_addr(const std::string& addr) {
  std::string host = "127.0.0.1";
  std::string port = addr;
  if (const auto colon = addr.rfind(':'); colon != std::string::npos) {
    host = addr.substr(0, colon);
    port = addr.substr(colon + 1);
    if (host.empty()) host = "127.0.0.1";
  }
  std::size_t used = 0;
  int p = -1;
  try {
    p = std::stoi(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port.size() || p < 0 || p > 65535) throw std::invalid_argument("bad bind address '" + addr + "'");
  return {host, p};
}

}  // namespace factcheck::service
