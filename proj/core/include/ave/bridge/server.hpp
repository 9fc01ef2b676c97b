#pragma once

// WebSocket server for live sessions. Each connection gets its own Session
// and event log; all sockets and sessions are driven from one I/O thread,
// so every session has a single owner. Physics ticks come from a
// drift-corrected timer at the session tick rate.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ave/bridge/session.hpp"
#include "ave/harness/config.hpp"
#include "ave/learn/network.hpp"

namespace ave::bridge {

struct ServerOptions {
  harness::ExperimentConfig config;  // serve settings, physics, copilot, reward
  learn::ValueApproximator copilot;
  std::string checkpoint_label;  // recorded in event logs
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  /// SIGINT and SIGTERM stop run().
  bool stop_on_signals = false;
  /// Called from the I/O thread after each finished connection.
  std::function<void(const std::string& session_id, const SessionStats&)> on_session_end;
};

class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Bound port (valid after construction).
  std::uint16_t port() const;
  /// Serves on the calling thread until stop().
  void run();
  /// Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Port precedence: explicit flag, then the PORT environment variable, then
/// the config value.
std::uint16_t resolve_port(std::optional<int> flag, const char* env_port, int config_port);

}  // namespace ave::bridge
