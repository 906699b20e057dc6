#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"
#include "salmanip/tools/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"HTTP service for saliency-driven image manipulation"};
  app.name("salmanip-serve");
  int port = 8080;
  std::string host = "0.0.0.0";
  std::string static_dir;
  salmanip::tools::ServiceOptions opts;
  app.add_option("--port", port, "Listening port")->capture_default_str();
  app.add_option("--host", host, "Listening address")->capture_default_str();
  app.add_option("--static-dir", static_dir, "Built web client served under /");
  app.add_option("--max-jobs", opts.max_concurrent_jobs, "Jobs allowed to run at once")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  opts.static_dir = static_dir;

  try {
    salmanip::tools::JobService service(opts);
    httplib::Server server;
    server.set_payload_max_length(64u << 20);
    salmanip::tools::install_routes(server, service);
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
