#pragma once

// Environment abstraction shared by the gridworld probe, pendulum and lander.
//
// Environments are immutable parameter objects; states are plain values
// (the snapshot). Stepping takes a state by const reference and returns a new
// one, so a snapshot can be fanned out to any number of independent rollouts.

#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ave/errors.hpp"
#include "ave/rng.hpp"
#include "ave/serial.hpp"

namespace ave {

struct ActionId {
  int index = 0;
  friend auto operator<=>(const ActionId&, const ActionId&) = default;
};

enum class OutcomeLabel : std::uint8_t { none, success, missed_goal, crash, timeout, out_of_bounds };

std::string_view to_string(OutcomeLabel label);

template <class State>
struct StepOutcome {
  State next_state;
  double reward = 0.0;
  bool done = false;
  OutcomeLabel info = OutcomeLabel::none;
};

template <class State>
struct Trajectory {
  std::vector<State> states;
  std::vector<ActionId> actions;
  std::vector<double> rewards;
};

enum class FeatureSelector : std::uint8_t {
  position,         // lander (x, y)
  human_cell,       // gridworld (row, col) of the human
  phase,            // pendulum (theta, omega)
  phase_embedding,  // pendulum (cos theta, sin theta, omega / omega_scale)
  full,             // every physical coordinate the environment exposes
};

/// Throws ConfigError on unknown names.
FeatureSelector parse_feature_selector(std::string_view name);
std::string_view to_string(FeatureSelector selector);

/// What a random rollout does when it reaches a terminal state early.
enum class TerminalPolicy : std::uint8_t {
  absorb,  // the terminal state is the final state
  drop,    // the sample is discarded
};

template <class E>
concept Environment = requires(const E& env, const typename E::State& s, ActionId a, SeededRng& rng,
                               FeatureSelector f) {
  typename E::State;
  { env.action_count() } -> std::convertible_to<int>;
  { env.step(s, a) } -> std::same_as<StepOutcome<typename E::State>>;
  { env.is_terminal(s) } -> std::convertible_to<bool>;
  { env.sample_action(s, rng) } -> std::same_as<ActionId>;
  { env.features(s, f) } -> std::same_as<std::vector<double>>;
  { env.serialize(s) } -> std::same_as<Bytes>;
};

/// Plays `horizon` uniformly sampled actions open-loop from a private copy of
/// `start`. Returns nullopt only under TerminalPolicy::drop when the rollout
/// terminated before the horizon.
template <Environment E>
std::optional<typename E::State> rollout_random(const E& env, const typename E::State& start, int horizon,
                                                SeededRng& rng, TerminalPolicy policy = TerminalPolicy::absorb) {
  if (horizon < 1) throw ContractViolation("rollout horizon must be >= 1");
  typename E::State s = start;
  for (int t = 0; t < horizon; ++t) {
    if (env.is_terminal(s)) {
      if (policy == TerminalPolicy::drop) return std::nullopt;
      break;
    }
    s = env.step(s, env.sample_action(s, rng)).next_state;
  }
  return s;
}

/// Executes a fixed action list, recording the trajectory. Steps after a
/// terminal state are absorbed (state repeated, zero reward).
template <Environment E>
Trajectory<typename E::State> run_actions(const E& env, const typename E::State& start,
                                          std::span<const ActionId> actions) {
  Trajectory<typename E::State> traj;
  traj.states.reserve(actions.size() + 1);
  traj.states.push_back(start);
  for (ActionId a : actions) {
    const auto& s = traj.states.back();
    if (env.is_terminal(s)) {
      traj.states.push_back(s);
      traj.rewards.push_back(0.0);
    } else {
      auto out = env.step(s, a);
      traj.states.push_back(std::move(out.next_state));
      traj.rewards.push_back(out.reward);
    }
    traj.actions.push_back(a);
  }
  return traj;
}

}  // namespace ave
