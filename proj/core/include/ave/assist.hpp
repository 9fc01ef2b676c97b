#pragma once

// Decision-makers: goal-inference assistant, empowerment-greedy assistant,
// oracle assistant (gridworld); simulated pilots and the copilot
// intervention rule (lander).

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ave/empowerment.hpp"
#include "ave/gridworld.hpp"
#include "ave/lander.hpp"

namespace ave::assist {

using grid::AgentAction;
using grid::Cell;
using grid::GridScenario;

// ---------------------------------------------------------------- gridworld

struct GoalBelief {
  std::vector<Cell> candidates;
  std::vector<double> probs;

  static GoalBelief uniform(std::vector<Cell> candidates);
  /// Throws ContractViolation unless probs is a distribution over candidates.
  void validate() const;
};

struct BeliefUpdate {
  GoalBelief belief;
  /// Every likelihood collapsed to zero; belief was reset to uniform. A
  /// misspecification signal.
  bool reset = false;
};

/// Boltzmann-rational goal posterior: p(g) <- p(g) * exp(beta * progress_g),
/// progress_g being the drop in BFS distance to g from the human's cell in
/// `before` to `observed`. Unreachable distances count as width*height.
BeliefUpdate belief_update(const GoalBelief& belief, const GridScenario& before, Cell observed, double beta);

/// Legal action minimising the belief-weighted BFS distance from the human to
/// the candidates after the move. Candidate cells are not protected from
/// blocks. Ties go to noop, then enumeration order.
AgentAction goal_inference_action(const GoalBelief& belief, const GridScenario& s);

/// Human empowerment of a scenario: the human-move probing environment with
/// the block layout frozen. Random estimators use the supplied seed set so
/// that candidate layouts are compared on common random numbers.
double human_empowerment(const GridScenario& s, const emp::EmpowermentQuery& query,
                         std::span<const std::uint64_t> seeds);

struct GreedyChoice {
  AgentAction action;
  double value = 0.0;
  std::vector<AgentAction> candidates;
  std::vector<double> values;
};

/// One-step lookahead on human empowerment over all legal agent actions.
/// Ties go to noop, then enumeration order.
GreedyChoice empowerment_greedy_choice(const GridScenario& s, const emp::EmpowermentQuery& query, SeededRng& rng);
AgentAction empowerment_greedy_action(const GridScenario& s, const emp::EmpowermentQuery& query, SeededRng& rng);

/// The route the greedy human would take to `goal` with every block removed.
std::vector<Cell> greedy_route(const GridScenario& s, Cell goal);

/// Knows the goal: clears the block nearest to the human on its route,
/// moving it to a free cell off the route. noop when the route is clear.
AgentAction oracle_action(const GridScenario& s, Cell true_goal);

// ------------------------------------------------------------------- lander

enum class PilotKind : std::uint8_t { noop, laggy, noisy, sensor, optimal, human };

PilotKind parse_pilot_kind(std::string_view name);
std::string_view to_string(PilotKind kind);

struct PilotConfig {
  PilotKind kind = PilotKind::optimal;
  double lag_prob = 0.85;
  double noise_prob = 0.3;
  void validate() const;
};

struct CopilotConfig {
  double alpha = 0.3;
  int memory_len = 20;
  double c_emp = 0.001;
  void validate() const;
};

/// Simulated pilot. `base_action` is the optimal pilot's choice (or the live
/// input for PilotKind::human); `prev_action` the pilot's own previous output.
ActionId pilot_act(const PilotConfig& config, ActionId base_action, ActionId prev_action,
                   const lander::LanderState& state, const lander::LanderParams& params, SeededRng& rng);

struct Intervention {
  ActionId executed;
  bool intervened = false;
};

/// Keeps the user's action when max q - q[user] <= alpha * (max q - min q);
/// otherwise executes argmax q (lowest index among ties).
Intervention copilot_intervene(ActionId user_action, std::span<const double> q_values, const CopilotConfig& config);

}  // namespace ave::assist
