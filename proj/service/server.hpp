#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "dchier/scenario.hpp"
#include "dchier/solvers.hpp"

namespace dchier::service {

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
};

/// Websocket endpoint /sim plus GET /healthz on one port. The scenario's
/// force source is replaced by the driver's force.
class Server {
 public:
  Server(Scenario scenario, Backend backend, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and launches the network and simulation threads; throws when the
  /// port cannot be bound.
  void start();
  void stop();
  /// Blocks until SIGINT or SIGTERM.
  void wait_for_signal();

  std::uint16_t port() const;
  std::uint64_t ticks() const;
  bool live() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace dchier::service
