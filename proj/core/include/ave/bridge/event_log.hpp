#pragma once

// Per-session event log (JSON lines). It holds every message in both
// directions plus one record per tick with the input handed to the session
// and whether a fine-tuning step ran, which makes a session replayable.
//
//   {"kind":"header","session_id":..,"checkpoint":..,"config":{..}}
//   {"kind":"in","tick":n,"raw":".."}
//   {"kind":"out","tick":n,"msg":{..}}
//   {"kind":"tick","tick":n,"input":a|null,"trained":bool}

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ave/bridge/protocol.hpp"
#include "ave/learn/network.hpp"

namespace ave::bridge {

class EventLog {
 public:
  explicit EventLog(const std::filesystem::path& path);

  void header(const std::string& session_id, const std::string& checkpoint, const nlohmann::json& config);
  void incoming(std::uint64_t tick, std::string_view raw);
  void outgoing(std::uint64_t tick, const WireMessage& m);
  void tick(std::uint64_t tick, std::optional<ActionId> input, bool trained);
  void flush();

 private:
  void line(const nlohmann::json& j);
  std::ofstream out_;
};

struct TickRecord {
  std::uint64_t tick = 0;
  std::optional<ActionId> input;
  bool trained = false;
};

struct LoggedSession {
  std::string session_id;
  std::string checkpoint;
  nlohmann::json config;
  std::vector<TickRecord> ticks;
  std::vector<WireMessage> outgoing;
  std::vector<std::string> incoming;
};

LoggedSession read_event_log(const std::filesystem::path& path);

struct ReplayReport {
  std::size_t ticks = 0;
  std::size_t compared = 0;  // frame and episode_end messages
  std::size_t mismatches = 0;
  std::optional<std::size_t> first_mismatch;  // index among compared messages
  std::vector<std::uint64_t> intervened_seqs;  // frames with the indicator lit
};

/// Re-runs the logged ticks with the same inputs and training decisions and
/// compares every frame and episode_end against the log.
ReplayReport replay_session(const LoggedSession& log, const learn::ValueApproximator& copilot);

}  // namespace ave::bridge
