#pragma once

#include <iosfwd>
#include <memory>

#include "chemreward/engine.hpp"

namespace chemreward {

/// Answers request lines from `in` on `out` until end of input, one line
/// each, flushing after every response so a pipe peer can wait on it.
/// Reward and advantage requests may be mixed.
void serve_stream(const Engine& engine, std::istream& in, std::ostream& out);

/// HTTP front end for the same protocol:
///   POST /v1/reward       JSON Lines of reward requests
///   POST /v1/advantages   JSON Lines of advantage requests
///   GET  /v1/health       {"status", "engine_version", "protocol_version"}
/// A POST body is answered as one JSON Lines body in request order.
class HttpService {
 public:
  explicit HttpService(const Engine& engine);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Returns the bound port (useful with port 0). Throws Error("bind_error").
  int bind(const BindAddress& address);
  /// Blocks until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chemreward
