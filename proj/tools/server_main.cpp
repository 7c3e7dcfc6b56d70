#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "factcheck/service/http_api.hpp"

#include <httplib.h>

using namespace factcheck::service;

namespace {
httplib::Server* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fact-checking HTTP service; configured through environment variables"};
  std::optional<std::string> bind;
  app.add_option("--bind", bind, "host:port, overrides BIND_ADDR");
  CLI11_PARSE(app, argc, argv);

  try {
    auto config = ServiceConfig::from_env();
    if (bind) config.bind_addr = *bind;
    const auto [host, port] = parse_bind_addr(config.bind_addr);
    auto service = PipelineService::from_config(config);
    std::cerr << to_json(service->health()).dump() << '\n';

    HttpApi api(*service, config.cors_origin);
    httplib::Server server;
    api.install(server);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "error: cannot bind " << config.bind_addr << '\n';
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
