#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strideway/config.hpp"
#include "strideway/dual_task.hpp"
#include "strideway/json_io.hpp"
#include "strideway/recording.hpp"

namespace strideway {

// Control channel over WebSocket. Text messages are JSON objects
// {"type": ..., "payload": {...}}; pressure frames travel as binary messages
// holding one PWK1 frame each. See docs/control-channel.md.

enum class SourceKind : std::uint8_t { sim, replay };

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  SourceKind source = SourceKind::sim;
  std::filesystem::path replay_dir;
  SessionConfig config;    // initial configuration, replaced by configure_session
  ScenarioFile scenario;   // walker driving the sim source
  std::vector<Sentence> bank;
  /// Session seconds per wall-clock second; 1 is real time.
  double time_scale = 1.0;
  /// Completed sessions are saved under out_dir/session-<n> when set.
  std::optional<std::filesystem::path> out_dir;
  double metrics_interval_s = 0.2;
  /// Binary frames a client may have queued before newer ones are dropped.
  std::size_t max_queued_frames = 8;
};

/// Builds a control message.
std::string control_message(const std::string& type,
                            nlohmann::ordered_json payload = nlohmann::ordered_json::object());

class ControlServer {
public:
  /// Binds the listening socket and starts serving. Throws std::runtime_error
  /// when the address is unavailable and RecordingError when the replay
  /// directory cannot be loaded.
  explicit ControlServer(ServerOptions options);
  ~ControlServer();

  ControlServer(const ControlServer&) = delete;
  ControlServer& operator=(const ControlServer&) = delete;

  std::uint16_t port() const;
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace strideway
