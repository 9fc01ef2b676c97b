#pragma once

// 2-D lander for the shared-autonomy task. Six discrete actions combine the
// main thruster (off/on) with the lateral thrusters (off/left/right). The
// episode ends on touchdown (landed or crashed), leaving the screen, or
// timing out.
//
// Frame: x in [-1, 1], ground at y = 0, y measured at the hull bottom
// centre. theta > 0 is a counter-clockwise tilt.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ave/env.hpp"

namespace ave::lander {

enum class Lateral : std::uint8_t { off, left, right };

/// Index table shared with the live cockpit:
///   0 off/off  1 off/left  2 off/right  3 main/off  4 main/left  5 main/right
struct LanderAction {
  bool main = false;
  Lateral lateral = Lateral::off;

  static constexpr int kCount = 6;
  static LanderAction from_id(ActionId a);
  ActionId id() const;
  friend bool operator==(const LanderAction&, const LanderAction&) = default;
};

inline constexpr ActionId kAllOff{0};

struct LanderParams {
  double dt = 0.02;
  int max_steps = 1000;
  double gravity = 1.0;
  /// Main-engine acceleration along the hull axis (thrust/weight = 1.5).
  double main_accel = 1.5;
  double lateral_accel = 0.2;
  /// Angular acceleration from a lateral burn; firing right tilts clockwise.
  double lateral_torque = 0.5;
  /// Self-righting angular stiffness and damping (pendulous hull).
  double righting = 2.0;
  double angular_damping = 1.0;
  /// Linear air drag on the hull velocity.
  double drag = 0.7;
  double leg_half_span = 0.06;

  double v_land = 0.3;
  double theta_land = 0.35;
  double pad_halfwidth = 0.1;

  double start_y = 1.2;
  double start_x_range = 0.4;
  double start_v_range = 0.2;
  double goal_range = 0.7;

  double reward_goal = 100.0;
  double reward_landed = 10.0;
  double reward_crash = -100.0;
  double reward_timeout = 0.0;
  double shaping = 0.01;
  /// Weight of the progress term potential(next) - potential(current).
  /// 0 leaves only the terminal bonus and the speed/tilt penalty.
  double progress_scale = 10.0;

  void validate() const;
};

struct LanderState {
  double x = 0.0;
  double y = 1.0;
  double vx = 0.0;
  double vy = 0.0;
  double theta = 0.0;
  double omega = 0.0;
  bool left_contact = false;
  bool right_contact = false;
  double goal_x = 0.0;
  int step_count = 0;

  double speed() const;
  friend bool operator==(const LanderState&, const LanderState&) = default;
};

enum class Outcome : std::uint8_t { landed_at_goal, landed_off_goal, crash, out_of_bounds, timeout };

std::string_view to_string(Outcome o);
OutcomeLabel to_label(Outcome o);

/// nullopt while the episode is live. Touchdown beats out-of-bounds beats timeout.
std::optional<Outcome> classify_outcome(const LanderState& s, const LanderParams& p);

/// One fixed-dt semi-implicit Euler step. Throws ContractViolation if `s`
/// already terminated. Reward is the task reward (terminal bonus plus
/// per-step shaping -shaping*(|v| + |theta|)).
StepOutcome<LanderState> lander_step(const LanderState& s, LanderAction a, const LanderParams& p);

/// -(distance to the pad centre on the ground + speed + |theta|) + 0.1 per
/// leg in contact.
double potential(const LanderState& s, const LanderParams& p);

/// Random start: hull at start_y, small random drift, random pad position.
LanderState reset(const LanderParams& p, SeededRng& rng);

/// Most recent user actions, newest first, at most `capacity`.
class ActionMemory {
 public:
  explicit ActionMemory(std::size_t capacity = 20) : capacity_(capacity) {}
  void push(ActionId a);
  void clear() { items_.clear(); }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::vector<ActionId> items() const { return {items_.begin(), items_.end()}; }

 private:
  std::size_t capacity_;
  std::deque<ActionId> items_;
};

enum class Role : std::uint8_t { pilot, copilot };

inline constexpr int kPhysicalDims = 8;
inline constexpr int kMemorySlots = 20;
inline constexpr int kMemoryTokens = LanderAction::kCount + 1;  // six actions + null
inline constexpr int kPilotObsDims = kPhysicalDims + 1;
inline constexpr int kCopilotObsDims = kPhysicalDims + kMemorySlots * kMemoryTokens;

/// Pilot: [x, y, vx, vy, theta, omega, left, right, goal_x].
/// Copilot: the 8 physical dims (goal masked) + 20 one-hot slots of 7
/// tokens, slot 0 the newest action; empty slots carry the null token.
std::vector<double> encode_observation(const LanderState& s, Role role, std::span<const ActionId> memory_newest_first);

class LanderEnv {
 public:
  using State = LanderState;

  explicit LanderEnv(LanderParams params = {});

  int action_count() const { return LanderAction::kCount; }
  StepOutcome<State> step(const State& s, ActionId a) const;
  bool is_terminal(const State& s) const { return classify_outcome(s, params_).has_value(); }
  ActionId sample_action(const State&, SeededRng& rng) const { return {rng.uniform_int(LanderAction::kCount)}; }
  /// position -> [x, y]; full -> the 8 physical dims.
  std::vector<double> features(const State& s, FeatureSelector f) const;
  /// Layout v1: u8 version=1, f64 x y vx vy theta omega, u8 left, u8 right,
  /// f64 goal_x, i32 step_count.
  Bytes serialize(const State& s) const;
  static State deserialize(std::span<const std::uint8_t> bytes);

  const LanderParams& params() const { return params_; }

 private:
  LanderParams params_;
};

static_assert(Environment<LanderEnv>);

}  // namespace ave::lander
