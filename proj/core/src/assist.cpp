#include "ave/assist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ave::assist {

using grid::Direction;
using grid::kDirections;

GoalBelief GoalBelief::uniform(std::vector<Cell> candidates) {
  GoalBelief b;
  b.probs.assign(candidates.size(), candidates.empty() ? 0.0 : 1.0 / static_cast<double>(candidates.size()));
  b.candidates = std::move(candidates);
  return b;
}

void GoalBelief::validate() const {
  if (candidates.empty() || candidates.size() != probs.size()) throw ContractViolation("belief size mismatch");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ContractViolation("belief probabilities must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ContractViolation("belief must sum to 1");
}

namespace {

int penalised(const std::vector<int>& field, const GridScenario& s, Cell c) {
  if (!s.in_bounds(c)) return s.width * s.height;
  const int d = field[static_cast<std::size_t>(c.row * s.width + c.col)];
  return d < 0 ? s.width * s.height : d;
}

}  // namespace

BeliefUpdate belief_update(const GoalBelief& belief, const GridScenario& before, Cell observed, double beta) {
  belief.validate();
  const bool legal = observed == before.human ||
                     (grid::manhattan(observed, before.human) == 1 && before.in_bounds(observed) &&
                      !before.is_block(observed));
  if (!legal) throw ContractViolation("observed human cell is not a legal move");

  const std::size_t n = belief.candidates.size();
  std::vector<double> log_post(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto field = grid::distance_field(before, belief.candidates[i]);
    const int progress = penalised(field, before, before.human) - penalised(field, before, observed);
    log_post[i] = belief.probs[i] > 0.0 ? std::log(belief.probs[i]) + beta * progress
                                        : -std::numeric_limits<double>::infinity();
    top = std::max(top, log_post[i]);
  }

  BeliefUpdate out;
  out.belief.candidates = belief.candidates;
  out.belief.probs.resize(n);
  double sum = 0.0;
  if (std::isfinite(top)) {
    for (std::size_t i = 0; i < n; ++i) sum += out.belief.probs[i] = std::exp(log_post[i] - top);
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    out.belief = GoalBelief::uniform(belief.candidates);
    out.reset = true;
    return out;
  }
  for (double& p : out.belief.probs) p /= sum;
  return out;
}

AgentAction goal_inference_action(const GoalBelief& belief, const GridScenario& s) {
  belief.validate();
  AgentAction best = AgentAction::noop();
  double best_cost = std::numeric_limits<double>::infinity();
  for (const AgentAction& a : grid::legal_agent_actions(s)) {
    const GridScenario next = grid::apply_agent_action(s, a);
    const auto field = grid::distance_field(next, next.human);
    double cost = 0.0;
    for (std::size_t i = 0; i < belief.candidates.size(); ++i)
      cost += belief.probs[i] * penalised(field, next, belief.candidates[i]);
    if (cost < best_cost) {
      best_cost = cost;
      best = a;
    }
  }
  return best;
}

double human_empowerment(const GridScenario& s, const emp::EmpowermentQuery& query,
                         std::span<const std::uint64_t> seeds) {
  const grid::HumanProbeEnv env(s);
  switch (query.estimator) {
    case emp::Estimator::exact: {
      SeededRng unused(0);
      return emp::exact_empowerment(env, s.human, query, unused);
    }
    case emp::Estimator::distinct:
      return emp::mc_distinct_empowerment_seeded(env, s.human, query, seeds);
    case emp::Estimator::proxy:
      return emp::diversity_bonus_seeded(env, s.human, query, seeds);
  }
  return 0.0;
}

GreedyChoice empowerment_greedy_choice(const GridScenario& s, const emp::EmpowermentQuery& query, SeededRng& rng) {
  query.validate();
  std::vector<std::uint64_t> seeds;
  if (query.estimator != emp::Estimator::exact) seeds = emp::draw_rollout_seeds(query.n_rollouts, rng);
  GreedyChoice choice;
  choice.candidates = grid::legal_agent_actions(s);
  choice.value = -std::numeric_limits<double>::infinity();
  for (const AgentAction& a : choice.candidates) {
    const double v = human_empowerment(grid::apply_agent_action(s, a), query, seeds);
    choice.values.push_back(v);
    if (v > choice.value) {
      choice.value = v;
      choice.action = a;
    }
  }
  return choice;
}

AgentAction empowerment_greedy_action(const GridScenario& s, const emp::EmpowermentQuery& query, SeededRng& rng) {
  return empowerment_greedy_choice(s, query, rng).action;
}

std::vector<Cell> greedy_route(const GridScenario& s, Cell goal) {
  GridScenario open = s;
  open.blocks.clear();
  open.goal = goal;
  std::vector<Cell> route;
  while (open.human != goal) {
    open = grid::human_step(open);
    route.push_back(open.human);
  }
  return route;
}

AgentAction oracle_action(const GridScenario& s, Cell true_goal) {
  const auto route = greedy_route(s, true_goal);
  auto on_route = [&](Cell c) { return std::find(route.begin(), route.end(), c) != route.end(); };
  for (Cell c : route) {
    if (!s.is_block(c)) continue;
    for (Direction d : kDirections) {
      const Cell dest = grid::neighbor(c, d);
      if (s.is_free(dest) && !on_route(dest)) return AgentAction::move(c, d);
    }
  }
  return AgentAction::noop();
}

PilotKind parse_pilot_kind(std::string_view name) {
  if (name == "noop") return PilotKind::noop;
  if (name == "laggy") return PilotKind::laggy;
  if (name == "noisy") return PilotKind::noisy;
  if (name == "sensor") return PilotKind::sensor;
  if (name == "optimal" || name == "full") return PilotKind::optimal;
  if (name == "human") return PilotKind::human;
  throw ConfigError("unknown pilot kind '" + std::string(name) + "'");
}

std::string_view to_string(PilotKind kind) {
  switch (kind) {
    case PilotKind::noop: return "noop";
    case PilotKind::laggy: return "laggy";
    case PilotKind::noisy: return "noisy";
    case PilotKind::sensor: return "sensor";
    case PilotKind::optimal: return "optimal";
    case PilotKind::human: return "human";
  }
  return "?";
}

void PilotConfig::validate() const {
  if (!(lag_prob >= 0.0 && lag_prob <= 1.0 && noise_prob >= 0.0 && noise_prob <= 1.0))
    throw ConfigError("pilot probabilities must lie in [0, 1]");
}

void CopilotConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("copilot alpha must be >= 0");
  if (memory_len < 0) throw ConfigError("copilot memory length must be >= 0");
  if (!(c_emp >= 0.0)) throw ConfigError("c_emp must be >= 0");
}

ActionId pilot_act(const PilotConfig& config, ActionId base_action, ActionId prev_action,
                   const lander::LanderState& state, const lander::LanderParams& params, SeededRng& rng) {
  using lander::LanderAction;
  using lander::Lateral;
  switch (config.kind) {
    case PilotKind::noop:
      return lander::kAllOff;
    case PilotKind::laggy:
      return rng.bernoulli(config.lag_prob) ? prev_action : base_action;
    case PilotKind::noisy: {
      if (!rng.bernoulli(config.noise_prob)) return base_action;
      const int other = rng.uniform_int(LanderAction::kCount - 1);
      return {other >= base_action.index ? other + 1 : other};
    }
    case PilotKind::sensor: {
      const double dx = state.x - state.goal_x;
      if (std::abs(dx) <= params.pad_halfwidth) return lander::kAllOff;
      return LanderAction{false, dx < 0 ? Lateral::right : Lateral::left}.id();
    }
    case PilotKind::optimal:
    case PilotKind::human:
      return base_action;
  }
  return base_action;
}

Intervention copilot_intervene(ActionId user_action, std::span<const double> q, const CopilotConfig& config) {
  if (q.size() != static_cast<std::size_t>(lander::LanderAction::kCount))
    throw ContractViolation("copilot expects one Q-value per action");
  if (user_action.index < 0 || user_action.index >= static_cast<int>(q.size()))
    throw ContractViolation("user action out of range");
  const auto max_it = std::max_element(q.begin(), q.end());
  const double max_q = *max_it;
  const double min_q = *std::min_element(q.begin(), q.end());
  if (max_q - q[static_cast<std::size_t>(user_action.index)] <= config.alpha * (max_q - min_q))
    return {user_action, false};
  return {ActionId{static_cast<int>(max_it - q.begin())}, true};
}

}  // namespace ave::assist
