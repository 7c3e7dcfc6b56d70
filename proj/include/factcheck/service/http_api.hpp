#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "factcheck/service/pipeline.hpp"

namespace httplib {
class Server;
}

namespace factcheck::service {

struct HttpResult {
  int status = 200;
  nlohmann::json body;
};

// Transport-independent routing for the four endpoints:
//   POST /api/v1/analyze/claim, POST /api/v1/analyze/article,
//   POST /api/v1/feedback, GET /api/v1/health.
// Errors come back as {"error": {"code": ..., "message": ...}}.
class HttpApi {
 public:
  explicit HttpApi(PipelineService& service, std::string cors_origin = "*");

  HttpResult handle(const std::string& method, const std::string& path, const std::string& body);

  // Registers the routes, CORS headers and OPTIONS preflight on `server`.
  void install(httplib::Server& server);

  const std::string& cors_origin() const { return cors_origin_; }

 private:
  PipelineService& service_;
  std::string cors_origin_;
};

}  // namespace factcheck::service
