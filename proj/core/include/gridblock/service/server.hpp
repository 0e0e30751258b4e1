// server.hpp - WebSocket front end for the session protocol
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "gridblock/service/protocol.hpp"

namespace gridblock::service
{

struct ServerOptions
{
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  std::string path = "/session";
  std::string default_task = "tile-cleaning";
  std::chrono::seconds idle_limit = std::chrono::minutes(30);
  unsigned threads = 1;
};

/// Port from the GRIDBLOCK_PORT environment variable, or `fallback`.
std::uint16_t port_from_env(std::uint16_t fallback = 8765);

/**
 * Accepts WebSocket upgrades on `path`. A new connection gets a SESSION
 * frame {sessionId, taskId}; connecting with `?session=<id>` resumes an
 * existing session. Each text frame is handled in order under the
 * session's lock and its replies are sent back in order.
 */
class Server
{
public:
  Server(TaskRegistry tasks, ServerOptions options = {});
  ~Server();

  Server(const Server &) = delete;
  Server & operator=(const Server &) = delete;

  /// Bind and start the worker threads; returns immediately.
  void start();
  /// Block until stop() is called (or SIGINT/SIGTERM when `handle_signals`).
  void wait(bool handle_signals = false);
  void stop();

  std::uint16_t port() const;
  SessionTable & sessions();

  struct Impl;

private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace gridblock::service
