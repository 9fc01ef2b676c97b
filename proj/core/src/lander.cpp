#include "ave/lander.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ave::lander {

LanderAction LanderAction::from_id(ActionId a) {
  if (a.index < 0 || a.index >= kCount) throw ContractViolation("lander action index out of range");
  return {a.index >= 3, static_cast<Lateral>(a.index % 3)};
}

ActionId LanderAction::id() const { return {(main ? 3 : 0) + static_cast<int>(lateral)}; }

void LanderParams::validate() const {
  if (!(dt > 0 && gravity > 0 && main_accel > 0 && v_land > 0 && theta_land > 0 && pad_halfwidth > 0))
    throw ConfigError("lander parameters must be positive");
  if (drag < 0) throw ConfigError("lander drag must be >= 0");
  if (max_steps < 1) throw ConfigError("lander max_steps must be >= 1");
  if (start_y <= 0) throw ConfigError("lander start_y must be above the ground");
}

double LanderState::speed() const { return std::hypot(vx, vy); }

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::landed_at_goal: return "landed_at_goal";
    case Outcome::landed_off_goal: return "landed_off_goal";
    case Outcome::crash: return "crash";
    case Outcome::out_of_bounds: return "out_of_bounds";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

OutcomeLabel to_label(Outcome o) {
  switch (o) {
    case Outcome::landed_at_goal: return OutcomeLabel::success;
    case Outcome::landed_off_goal: return OutcomeLabel::missed_goal;
    case Outcome::crash: return OutcomeLabel::crash;
    case Outcome::out_of_bounds: return OutcomeLabel::out_of_bounds;
    case Outcome::timeout: return OutcomeLabel::timeout;
  }
  return OutcomeLabel::none;
}

std::optional<Outcome> classify_outcome(const LanderState& s, const LanderParams& p) {
  if (s.left_contact || s.right_contact) {
    const bool landed = s.left_contact && s.right_contact && s.speed() <= p.v_land && std::abs(s.theta) <= p.theta_land;
    if (!landed) return Outcome::crash;
    return std::abs(s.x - s.goal_x) <= p.pad_halfwidth ? Outcome::landed_at_goal : Outcome::landed_off_goal;
  }
  if (std::abs(s.x) > 1.0) return Outcome::out_of_bounds;
  if (s.step_count >= p.max_steps) return Outcome::timeout;
  return std::nullopt;
}

namespace {

double terminal_reward(Outcome o, const LanderParams& p) {
  switch (o) {
    case Outcome::landed_at_goal: return p.reward_goal;
    case Outcome::landed_off_goal: return p.reward_landed;
    case Outcome::crash:
    case Outcome::out_of_bounds: return p.reward_crash;
    case Outcome::timeout: return p.reward_timeout;
  }
  return 0.0;
}

}  // namespace

double potential(const LanderState& s, const LanderParams& p) {
  (void)p;
  const double legs = (s.left_contact ? 0.1 : 0.0) + (s.right_contact ? 0.1 : 0.0);
  return -(std::hypot(s.x - s.goal_x, s.y) + s.speed() + std::abs(s.theta)) + legs;
}

StepOutcome<LanderState> lander_step(const LanderState& s, LanderAction a, const LanderParams& p) {
  if (classify_outcome(s, p)) throw ContractViolation("lander_step called on a terminated episode");

  const double lat = a.lateral == Lateral::right ? 1.0 : a.lateral == Lateral::left ? -1.0 : 0.0;
  const double main = a.main ? 1.0 : 0.0;
  const double sin_t = std::sin(s.theta);
  const double cos_t = std::cos(s.theta);

  double ax = -p.drag * s.vx;
  double ay = -p.gravity - p.drag * s.vy;
  if (main != 0.0) {
    ax += -main * p.main_accel * sin_t;
    ay += main * p.main_accel * cos_t;
  }
  if (lat != 0.0) {
    ax += lat * p.lateral_accel * cos_t;
    ay += lat * p.lateral_accel * sin_t;
  }
  const double alpha = -lat * p.lateral_torque - p.righting * sin_t - p.angular_damping * s.omega;

  LanderState n = s;
  n.vx += ax * p.dt;
  n.vy += ay * p.dt;
  n.omega += alpha * p.dt;
  n.x += n.vx * p.dt;
  n.y += n.vy * p.dt;
  n.theta += n.omega * p.dt;
  n.step_count = s.step_count + 1;

  const double span = p.leg_half_span * std::sin(n.theta);
  const double left_h = n.y - span;
  const double right_h = n.y + span;
  const double lowest = std::min(left_h, right_h);
  if (lowest <= 0.0) {
    if (n.speed() <= p.v_land && std::abs(n.theta) <= p.theta_land) {
      // Soft touchdown: the hull settles onto both legs.
      n.y = 0.0;
      n.vx = n.vy = n.theta = n.omega = 0.0;
      n.left_contact = n.right_contact = true;
    } else {
      n.y -= lowest;
      n.left_contact = left_h <= lowest;
      n.right_contact = right_h <= lowest;
    }
  }

  double reward = -p.shaping * (n.speed() + std::abs(n.theta));
  if (p.progress_scale != 0.0) reward += p.progress_scale * (potential(n, p) - potential(s, p));
  StepOutcome<LanderState> out{n, reward, false, OutcomeLabel::none};
  if (auto o = classify_outcome(n, p)) {
    out.done = true;
    out.info = to_label(*o);
    out.reward += terminal_reward(*o, p);
  }
  return out;
}

LanderState reset(const LanderParams& p, SeededRng& rng) {
  LanderState s;
  s.x = rng.uniform(-p.start_x_range, p.start_x_range);
  s.y = p.start_y;
  s.vx = rng.uniform(-p.start_v_range, p.start_v_range);
  s.vy = rng.uniform(-p.start_v_range, 0.0);
  s.goal_x = rng.uniform(-p.goal_range, p.goal_range);
  return s;
}

void ActionMemory::push(ActionId a) {
  items_.push_front(a);
  while (items_.size() > capacity_) items_.pop_back();
}

std::vector<double> encode_observation(const LanderState& s, Role role, std::span<const ActionId> memory) {
  std::vector<double> obs{s.x,     s.y,     s.vx, s.vy, s.theta, s.omega, s.left_contact ? 1.0 : 0.0,
                          s.right_contact ? 1.0 : 0.0};
  if (role == Role::pilot) {
    obs.push_back(s.goal_x);
    return obs;
  }
  obs.resize(kCopilotObsDims, 0.0);
  for (int slot = 0; slot < kMemorySlots; ++slot) {
    int token = LanderAction::kCount;  // null
    if (static_cast<std::size_t>(slot) < memory.size()) {
      token = memory[static_cast<std::size_t>(slot)].index;
      if (token < 0 || token >= LanderAction::kCount) throw ContractViolation("memory action out of range");
    }
    obs[static_cast<std::size_t>(kPhysicalDims + slot * kMemoryTokens + token)] = 1.0;
  }
  return obs;
}

LanderEnv::LanderEnv(LanderParams params) : params_(params) { params_.validate(); }

StepOutcome<LanderState> LanderEnv::step(const State& s, ActionId a) const {
  return lander_step(s, LanderAction::from_id(a), params_);
}

std::vector<double> LanderEnv::features(const State& s, FeatureSelector f) const {
  switch (f) {
    case FeatureSelector::position:
      return {s.x, s.y};
    case FeatureSelector::full:
      return {s.x, s.y, s.vx, s.vy, s.theta, s.omega, s.left_contact ? 1.0 : 0.0, s.right_contact ? 1.0 : 0.0};
    default:
      throw ConfigError("feature selector '" + std::string(to_string(f)) + "' is not defined for the lander");
  }
}

Bytes LanderEnv::serialize(const State& s) const {
  ByteWriter w;
  w.u8(1);
  for (double v : {s.x, s.y, s.vx, s.vy, s.theta, s.omega}) w.f64(v);
  w.u8(s.left_contact ? 1 : 0);
  w.u8(s.right_contact ? 1 : 0);
  w.f64(s.goal_x);
  w.i32(s.step_count);
  return std::move(w).bytes();
}

LanderState LanderEnv::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u8() != 1) throw ConfigError("unsupported lander state layout");
  LanderState s;
  s.x = r.f64();
  s.y = r.f64();
  s.vx = r.f64();
  s.vy = r.f64();
  s.theta = r.f64();
  s.omega = r.f64();
  s.left_contact = r.u8() != 0;
  s.right_contact = r.u8() != 0;
  s.goal_x = r.f64();
  s.step_count = r.i32();
  return s;
}

}  // namespace ave::lander
