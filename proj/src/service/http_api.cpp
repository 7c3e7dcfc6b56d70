#include "factcheck/service/http_api.hpp"

#include <cmath>
#include <stdexcept>

// After the Eigen-based headers: <resolv.h>, pulled in by httplib, defines
// a _res macro that collides with Eigen identifiers.
#include <httplib.h>

namespace factcheck::service {
namespace {

using nlohmann::json;

constexpr const char* kClaimPath = "/api/v1/analyze/claim";
constexpr const char* kArticlePath = "/api/v1/analyze/article";
constexpr const char* kFeedbackPath = "/api/v1/feedback";
constexpr const char* kHealthPath = "/api/v1/health";

HttpResult error(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", {{"code", code}, {"message", message}}}}};
}

[[noreturn]] void bad_request(const std::string& message) { throw ServiceError(400, "invalid_request", message); }

json parse_object(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) bad_request("body is not valid JSON");
  if (!j.is_object()) bad_request("body must be a JSON object");
  return j;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) bad_request(std::string("'") + key + "' must be a string");
  return j[key].get<std::string>();
}

std::map<sadhan::AspectKind, std::string> parse_aspects(const json& j) {
  std::map<sadhan::AspectKind, std::string> out;
  if (!j.contains("aspects") || j["aspects"].is_null()) return out;
  if (!j["aspects"].is_object()) bad_request("'aspects' must be an object");
  for (const auto& [key, value] : j["aspects"].items()) {
    sadhan::AspectKind kind;
    try {
      kind = sadhan::parse_aspect_kind(key);
    } catch (const std::invalid_argument&) {
      bad_request("unknown aspect '" + key + "'");
    }
    if (!value.is_string()) bad_request("aspect '" + key + "' must be a string");
    if (!value.get<std::string>().empty()) out[kind] = value.get<std::string>();
  }
  return out;
}

AnalyzeClaimRequest parse_claim_request(const json& j) {
  AnalyzeClaimRequest r;
  auto text = optional_string(j, "claim_text");
  if (!text) bad_request("'claim_text' is required");
  r.claim_text = std::move(*text);
  r.page_url = optional_string(j, "page_url");
  r.aspects = parse_aspects(j);
  return r;
}

AnalyzeArticleRequest parse_article_request(const json& j) {
  AnalyzeArticleRequest r;
  r.article_url = optional_string(j, "article_url");
  r.article_text = optional_string(j, "article_text");
  if (j.contains("claim_threshold") && !j["claim_threshold"].is_null()) {
    if (!j["claim_threshold"].is_number()) bad_request("'claim_threshold' must be a number");
    r.claim_threshold = j["claim_threshold"].get<double>();
  }
  if (j.contains("top_k") && !j["top_k"].is_null()) {
    const auto& k = j["top_k"];
    if (!k.is_number_integer() || k.get<std::int64_t>() < 1) bad_request("'top_k' must be a positive integer");
    r.top_k = static_cast<std::size_t>(k.get<std::int64_t>());
  }
  r.aspects = parse_aspects(j);
  return r;
}

}  // namespace

HttpApi::HttpApi(PipelineService& service, std::string cors_origin)
    : service_(service), cors_origin_(std::move(cors_origin)) {}

HttpResult HttpApi::handle(const std::string& method, const std::string& path, const std::string& body) {
  const bool known = path == kClaimPath || path == kArticlePath || path == kFeedbackPath || path == kHealthPath;
  if (!known) return error(404, "not_found", "no route for " + path);
  const std::string expected = path == kHealthPath ? "GET" : "POST";
  if (method != expected) return error(405, "method_not_allowed", method + " not allowed on " + path);

  try {
    if (path == kHealthPath) return {200, to_json(service_.health())};
    const json j = parse_object(body);
    if (path == kClaimPath) return {200, to_json(service_.analyze_claim(parse_claim_request(j)))};
    if (path == kArticlePath) return {200, to_json(service_.analyze_article(parse_article_request(j)))};

    FeedbackRecord record;
    try {
      record = feedback_from_json(j);
    } catch (const std::invalid_argument& e) {
      bad_request(e.what());
    }
    const auto stored = service_.submit_feedback(std::move(record));
    return {200, {{"status", "recorded"}, {"request_id", stored.request_id}, {"timestamp", stored.timestamp}}};
  } catch (const ServiceError& e) {
    return error(e.status(), e.code(), e.what());
  } catch (const std::exception& e) {
    return error(500, "internal_error", e.what());
  }
}

void HttpApi::install(httplib::Server& server) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto result = handle(req.method, req.path, req.body);
    res.status = result.status;
    res.set_content(result.body.dump(), "application/json; charset=utf-8");
  };
  for (const char* path : {kClaimPath, kArticlePath, kFeedbackPath, kHealthPath}) {
    server.Post(path, route);
    server.Get(path, route);
  }
  server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto result = res.status == 404 ? handle(req.method, req.path, req.body)
                                          : error(res.status, "http_error", "request failed");
    res.set_content(result.body.dump(), "application/json; charset=utf-8");
  });
  server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", cors_origin_);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

}  // namespace factcheck::service
