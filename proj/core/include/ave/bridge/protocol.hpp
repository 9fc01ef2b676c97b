#pragma once

// Wire protocol between the live-session server and the cockpit: one JSON
// object per WebSocket text frame, discriminated by "type". Every listed
// field is required; unknown extra fields are ignored.
//
// Action indices: 0 off/off, 1 off/left, 2 off/right, 3 main/off,
// 4 main/left, 5 main/right.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "ave/env.hpp"

namespace ave::bridge {

inline constexpr int kProtoVersion = 1;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Hello {
  int proto_version = kProtoVersion;
  std::string session_id;
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct ConfigMsg {
  std::string condition;  // empowerment | baseline
  double alpha = 0.0;
  double c_emp = 0.0;
  double dt = 0.0;
  int tick_hz = 0;
  friend bool operator==(const ConfigMsg&, const ConfigMsg&) = default;
};

struct Input {
  std::uint64_t seq = 0;
  int action = 0;
  friend bool operator==(const Input&, const Input&) = default;
};

struct Frame {
  std::uint64_t seq = 0;
  double t = 0.0;
  double x = 0.0, y = 0.0, vx = 0.0, vy = 0.0, theta = 0.0, omega = 0.0;
  bool left_contact = false;
  bool right_contact = false;
  double goal_x = 0.0;
  int user_action = 0;
  int executed_action = 0;
  bool intervened = false;
  double emp_bonus = 0.0;
  int episode = 0;
  double score = 0.0;
  friend bool operator==(const Frame&, const Frame&) = default;
};

struct EpisodeEnd {
  int episode = 0;
  std::string outcome;
  double reward = 0.0;
  double success_rate_so_far = 0.0;
  friend bool operator==(const EpisodeEnd&, const EpisodeEnd&) = default;
};

struct ErrorMsg {
  std::string reason;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using WireMessage = std::variant<Hello, ConfigMsg, Input, Frame, EpisodeEnd, ErrorMsg>;

std::string_view type_name(const WireMessage& m);

nlohmann::json to_json(const WireMessage& m);
/// Throws ProtocolError naming the offending field.
WireMessage from_json(const nlohmann::json& j);

std::string encode(const WireMessage& m);
/// Throws ProtocolError on malformed JSON or schema violations.
WireMessage decode(std::string_view text);

/// An input message's action. Throws ProtocolError for anything else,
/// including indices outside 0-5.
ActionId decode_input(std::string_view text);

}  // namespace ave::bridge
