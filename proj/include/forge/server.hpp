#pragma once

// Single-port HTTP + WebSocket front end. REST and static assets go through
// Gateway::route; "GET /live" upgrades to the realtime protocol, with the
// auth code in the X-Auth-Code header or a "code" query parameter.

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "forge/gateway/gateway.hpp"
#include "forge/gateway/platform.hpp"

namespace forge {

struct ServerConfig {
  std::string address = "0.0.0.0";
  std::uint16_t port = 8080;  // 0 picks a free port
  unsigned threads = 2;
  std::chrono::milliseconds tick_interval{1000};
};

class Server {
 public:
  Server(gateway::Platform& platform, gateway::Gateway& gateway, ServerConfig config);
  ~Server();

  /// Binds and starts worker threads; returns once listening.
  void start();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();
  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace forge
