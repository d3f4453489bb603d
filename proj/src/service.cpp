#include "chemreward/service.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "chemreward/protocol.hpp"
#include "chemreward/text.hpp"
#include "chemreward/version.hpp"
#include "httplib.h"

namespace chemreward {

void serve_stream(const Engine& engine, std::istream& in, std::ostream& out) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    out << handle_line(engine, line, line_no) << '\n';
    out.flush();
  }
}

struct HttpService::Impl {
  const Engine& engine;
  httplib::Server server;

  explicit Impl(const Engine& e) : engine(e) {
    const auto threads = static_cast<std::size_t>(engine.config().threads);
    server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    const char* ndjson = "application/x-ndjson";
    server.Post("/v1/reward", [this, ndjson](const httplib::Request& req, httplib::Response& res) {
      res.set_content(handle_batch(engine, req.body, BatchKind::Reward, engine.config().threads), ndjson);
    });
    server.Post("/v1/advantages", [this, ndjson](const httplib::Request& req, httplib::Response& res) {
      res.set_content(handle_batch(engine, req.body, BatchKind::Advantage, engine.config().threads), ndjson);
    });
    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"status\":\"ok\",\"engine_version\":\"" + std::string(kEngineVersion) +
                          "\",\"protocol_version\":" + std::to_string(kProtocolVersion) + "}",
                      "application/json");
    });
  }
};

HttpService::HttpService(const Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}
HttpService::~HttpService() { stop(); }

int HttpService::bind(const BindAddress& address) {
  int port = address.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(address.host);
  } else if (!impl_->server.bind_to_port(address.host, port)) {
    port = -1;
  }
  if (port <= 0) {
    throw Error("bind_error", "cannot bind " + address.host + ":" + std::to_string(address.port));
  }
  return port;
}

void HttpService::run() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace chemreward
