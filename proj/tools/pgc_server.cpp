#include <spdlog/spdlog.h>

#include <csignal>

#include "CLI11.hpp"
#include "httplib.h"
#include "pgc/service.hpp"

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP session server for cage-based deformation"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshot_dir;
  pgc::ServiceOptions options;
  app.add_option("--host", host, "Address to bind");
  app.add_option("--port", port, "Port to listen on")->check(CLI::Range(1, 65535));
  app.add_option("--snapshot-dir", snapshot_dir, "Write each session's field binary and cage here");
  app.add_option("--cors-origin", options.cors_origin, "Allowed browser origin")->capture_default_str();
  app.add_option("--threads", options.encode_threads, "Encoding threads per session (0 = all cores)");
  CLI11_PARSE(app, argc, argv);
  options.snapshot_dir = snapshot_dir;

  try {
    pgc::SessionService service(options);
    httplib::Server server;
    service.mount(server);
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::info("{} {} -> {}", req.method, req.path, res.status);
    });
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    spdlog::info("listening on {}:{}", host, port);
    if (!server.listen(host, port)) {
      spdlog::error("cannot bind {}:{}", host, port);
      return 3;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
