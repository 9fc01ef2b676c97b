#include "ave/bridge/protocol.hpp"

#include "ave/lander.hpp"

namespace ave::bridge {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw ProtocolError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) throw ProtocolError(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t counter(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ProtocolError(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool boolean(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_boolean()) throw ProtocolError(std::string("field '") + key + "' must be true or false");
  return v.get<bool>();
}

std::string text(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw ProtocolError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

int action(const json& j, const char* key) {
  const auto a = integer(j, key);
  if (a < 0 || a >= lander::LanderAction::kCount)
    throw ProtocolError(std::string("field '") + key + "' must be an action index 0-5, got " + std::to_string(a));
  return static_cast<int>(a);
}

struct ToJson {
  json operator()(const Hello& m) const {
    return {{"type", "hello"}, {"proto_version", m.proto_version}, {"session_id", m.session_id}};
  }
  json operator()(const ConfigMsg& m) const {
    return {{"type", "config"}, {"condition", m.condition}, {"alpha", m.alpha},
            {"c_emp", m.c_emp}, {"dt", m.dt},               {"tick_hz", m.tick_hz}};
  }
  json operator()(const Input& m) const { return {{"type", "input"}, {"seq", m.seq}, {"action", m.action}}; }
  json operator()(const Frame& m) const {
    return {{"type", "frame"},
            {"seq", m.seq},
            {"t", m.t},
            {"x", m.x},
            {"y", m.y},
            {"vx", m.vx},
            {"vy", m.vy},
            {"theta", m.theta},
            {"omega", m.omega},
            {"left_contact", m.left_contact},
            {"right_contact", m.right_contact},
            {"goal_x", m.goal_x},
            {"user_action", m.user_action},
            {"executed_action", m.executed_action},
            {"intervened", m.intervened},
            {"emp_bonus", m.emp_bonus},
            {"episode", m.episode},
            {"score", m.score}};
  }
  json operator()(const EpisodeEnd& m) const {
    return {{"type", "episode_end"},
            {"episode", m.episode},
            {"outcome", m.outcome},
            {"reward", m.reward},
            {"success_rate_so_far", m.success_rate_so_far}};
  }
  json operator()(const ErrorMsg& m) const { return {{"type", "error"}, {"reason", m.reason}}; }
};

}  // namespace

std::string_view type_name(const WireMessage& m) {
  static constexpr std::string_view names[] = {"hello", "config", "input", "frame", "episode_end", "error"};
  return names[m.index()];
}

json to_json(const WireMessage& m) { return std::visit(ToJson{}, m); }

WireMessage from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  const std::string type = text(j, "type");
  if (type == "hello") {
    Hello m;
    m.proto_version = static_cast<int>(integer(j, "proto_version"));
    m.session_id = text(j, "session_id");
    return m;
  }
  if (type == "config") {
    ConfigMsg m;
    m.condition = text(j, "condition");
    m.alpha = number(j, "alpha");
    m.c_emp = number(j, "c_emp");
    m.dt = number(j, "dt");
    m.tick_hz = static_cast<int>(integer(j, "tick_hz"));
    return m;
  }
  if (type == "input") {
    Input m;
    m.seq = counter(j, "seq");
    m.action = action(j, "action");
    return m;
  }
  if (type == "frame") {
    Frame m;
    m.seq = counter(j, "seq");
    m.t = number(j, "t");
    m.x = number(j, "x");
    m.y = number(j, "y");
    m.vx = number(j, "vx");
    m.vy = number(j, "vy");
    m.theta = number(j, "theta");
    m.omega = number(j, "omega");
    m.left_contact = boolean(j, "left_contact");
    m.right_contact = boolean(j, "right_contact");
    m.goal_x = number(j, "goal_x");
    m.user_action = action(j, "user_action");
    m.executed_action = action(j, "executed_action");
    m.intervened = boolean(j, "intervened");
    m.emp_bonus = number(j, "emp_bonus");
    m.episode = static_cast<int>(integer(j, "episode"));
    m.score = number(j, "score");
    return m;
  }
  if (type == "episode_end") {
    EpisodeEnd m;
    m.episode = static_cast<int>(integer(j, "episode"));
    m.outcome = text(j, "outcome");
    m.reward = number(j, "reward");
    m.success_rate_so_far = number(j, "success_rate_so_far");
    return m;
  }
  if (type == "error") return ErrorMsg{text(j, "reason")};
  throw ProtocolError("unknown message type '" + type + "'");
}

std::string encode(const WireMessage& m) { return to_json(m).dump(); }

WireMessage decode(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw ProtocolError("message is not valid JSON");
  return from_json(j);
}

ActionId decode_input(std::string_view text) {
  const auto m = decode(text);
  const auto* in = std::get_if<Input>(&m);
  if (!in) throw ProtocolError("expected an input message, got " + std::string(type_name(m)));
  return ActionId{in->action};
}

}  // namespace ave::bridge
