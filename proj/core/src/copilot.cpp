#include "ave/learn/copilot.hpp"

#include <cmath>

#include "ave/errors.hpp"

namespace ave::learn {

using assist::PilotKind;
using lander::LanderAction;
using lander::Role;

SimulatedPilot::SimulatedPilot(assist::PilotConfig config, const ValueApproximator* optimal,
                               const lander::LanderParams& params)
    : config_(config), optimal_(optimal), params_(params) {
  config_.validate();
  const bool needs_base =
      config_.kind == PilotKind::laggy || config_.kind == PilotKind::noisy || config_.kind == PilotKind::optimal;
  if (needs_base && optimal_ == nullptr)
    throw ConfigError(std::string(assist::to_string(config_.kind)) + " pilot needs an optimal-pilot network");
  if (config_.kind == PilotKind::human) throw ConfigError("the human pilot is driven live, not simulated");
}

ActionId SimulatedPilot::act(const lander::LanderState& s, SeededRng& rng) {
  ActionId base = lander::kAllOff;
  if (optimal_ != nullptr) base = ActionId{greedy_action(*optimal_, lander::encode_observation(s, Role::pilot, {}))};
  prev_ = assist::pilot_act(config_, base, prev_, s, params_, rng);
  return prev_;
}

CopilotDecision copilot_decide(const ValueApproximator& copilot, const lander::LanderState& s,
                               lander::ActionMemory& memory, ActionId user, const assist::CopilotConfig& config) {
  memory.push(user);
  CopilotDecision d;
  const auto items = memory.items();
  d.obs = lander::encode_observation(s, Role::copilot, items);
  const Eigen::VectorXd q = copilot.predict(d.obs);
  d.q.assign(q.data(), q.data() + q.size());
  d.intervention = assist::copilot_intervene(user, d.q, config);
  return d;
}

namespace {

struct Pending {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
};

double mean_or_zero(double sum, int n) { return n > 0 ? sum / n : 0.0; }

}  // namespace

TrainResult train_copilot(const lander::LanderEnv& env, SimulatedPilot pilot, const assist::CopilotConfig& copilot,
                          const RewardSpec& reward, const TrainSchedule& schedule, const SeededRng& rng,
                          const ValueApproximator* init) {
  copilot.validate();
  reward.validate();
  schedule.validate();
  SeededRng init_rng = rng.fork(Stream::init);
  ValueApproximator net =
      init ? *init : ValueApproximator(lander::kCopilotObsDims, schedule.hidden, LanderAction::kCount, init_rng);
  if (net.input_dim() != lander::kCopilotObsDims || net.outputs() != LanderAction::kCount)
    throw ConfigError("copilot network has the wrong shape");

  TrainResult result{net, {}, std::nullopt};
  if (schedule.episodes == 0) return result;

  DqnLearner learner(net, schedule, reward.gamma, lander::kCopilotObsDims, rng.fork(Stream::replay));
  SeededRng reset_rng = rng.fork(Stream::resets);
  SeededRng pilot_rng = rng.fork(Stream::pilot);
  SeededRng explore_rng = rng.fork(Stream::explore);
  SeededRng bonus_rng = rng.fork(Stream::bonus);
  lander::ActionMemory memory(static_cast<std::size_t>(copilot.memory_len));
  std::int64_t env_steps = 0;

  try {
    for (int ep = 0; ep < schedule.episodes; ++ep) {
      const double eps = schedule.epsilon(ep);
      lander::LanderState s = lander::reset(env.params(), reset_rng);
      memory.clear();
      pilot.reset();
      std::optional<Pending> pending;
      EpisodeLog log;
      log.episode = ep;
      double loss_sum = 0.0, bonus_sum = 0.0;
      int loss_n = 0;

      for (int t = 0; t < schedule.max_steps; ++t) {
        const ActionId user = pilot.act(s, pilot_rng);
        CopilotDecision d = copilot_decide(learner.online(), s, memory, user, copilot);
        if (pending) {
          learner.store(pending->obs, pending->action, pending->reward, d.obs, false);
          pending.reset();
        }
        ActionId executed = d.intervention.executed;
        if (explore_rng.bernoulli(eps)) executed = ActionId{explore_rng.uniform_int(LanderAction::kCount)};

        const auto out = env.step(s, executed);
        const double bonus = emp::diversity_bonus(env, out.next_state, reward.emp_query, bonus_rng);
        const double r = augmented_reward(out.reward, bonus, reward);
        bonus_sum += bonus;
        log.ret += out.reward;
        ++log.steps;

        if (out.done)
          learner.store(d.obs, executed.index, r, d.obs, true);
        else
          pending = Pending{std::move(d.obs), executed.index, r};

        if (++env_steps % schedule.train_every == 0 && learner.ready()) {
          loss_sum += learner.learn();
          ++loss_n;
        }
        s = out.next_state;
        if (out.done) break;
      }
      const auto outcome = lander::classify_outcome(s, env.params());
      log.success = outcome == lander::Outcome::landed_at_goal;
      log.outcome = outcome ? std::string(lander::to_string(*outcome)) : "truncated";
      log.loss = mean_or_zero(loss_sum, loss_n);
      log.mean_bonus = mean_or_zero(bonus_sum, log.steps);
      result.curve.push_back(std::move(log));
    }
  } catch (const DivergenceError& e) {
    result.error = e.what();
  }
  result.net = learner.online();
  return result;
}

TrainResult train_optimal_pilot(const lander::LanderEnv& env, const TrainSchedule& schedule, double gamma,
                                const SeededRng& rng) {
  schedule.validate();
  SeededRng init_rng = rng.fork(Stream::init);
  ValueApproximator net(lander::kPilotObsDims, schedule.hidden, LanderAction::kCount, init_rng);
  TrainResult result{net, {}, std::nullopt};
  if (schedule.episodes == 0) return result;

  DqnLearner learner(net, schedule, gamma, lander::kPilotObsDims, rng.fork(Stream::replay));
  SeededRng reset_rng = rng.fork(Stream::resets);
  SeededRng explore_rng = rng.fork(Stream::explore);
  std::int64_t env_steps = 0;

  try {
    for (int ep = 0; ep < schedule.episodes; ++ep) {
      const double eps = schedule.epsilon(ep);
      lander::LanderState s = lander::reset(env.params(), reset_rng);
      EpisodeLog log;
      log.episode = ep;
      double loss_sum = 0.0;
      int loss_n = 0;
      std::vector<double> obs = lander::encode_observation(s, Role::pilot, {});

      for (int t = 0; t < schedule.max_steps; ++t) {
        ActionId a{greedy_action(learner.online(), obs)};
        if (explore_rng.bernoulli(eps)) a = ActionId{explore_rng.uniform_int(LanderAction::kCount)};
        const auto out = env.step(s, a);
        std::vector<double> next = lander::encode_observation(out.next_state, Role::pilot, {});
        learner.store(obs, a.index, out.reward, next, out.done);
        log.ret += out.reward;
        ++log.steps;
        if (++env_steps % schedule.train_every == 0 && learner.ready()) {
          loss_sum += learner.learn();
          ++loss_n;
        }
        s = out.next_state;
        obs = std::move(next);
        if (out.done) break;
      }
      const auto outcome = lander::classify_outcome(s, env.params());
      log.success = outcome == lander::Outcome::landed_at_goal;
      log.outcome = outcome ? std::string(lander::to_string(*outcome)) : "truncated";
      log.loss = mean_or_zero(loss_sum, loss_n);
      result.curve.push_back(std::move(log));
    }
  } catch (const DivergenceError& e) {
    result.error = e.what();
  }
  result.net = learner.online();
  return result;
}

EvalResult evaluate(const lander::LanderEnv& env, SimulatedPilot pilot, const ValueApproximator* copilot,
                    const assist::CopilotConfig& config, int episodes, const SeededRng& rng) {
  if (episodes < 0) throw ConfigError("evaluation episode count must be >= 0");
  EvalResult res;
  res.episodes = episodes;
  SeededRng reset_rng = rng.fork(Stream::resets);
  SeededRng pilot_rng = rng.fork(Stream::pilot);
  lander::ActionMemory memory(static_cast<std::size_t>(config.memory_len));
  double total_return = 0.0;
  std::int64_t steps = 0, interventions = 0;

  for (int ep = 0; ep < episodes; ++ep) {
    lander::LanderState s = lander::reset(env.params(), reset_rng);
    memory.clear();
    pilot.reset();
    while (!env.is_terminal(s)) {
      const ActionId user = pilot.act(s, pilot_rng);
      ActionId executed = user;
      if (copilot != nullptr) {
        const auto d = copilot_decide(*copilot, s, memory, user, config);
        executed = d.intervention.executed;
        interventions += d.intervention.intervened ? 1 : 0;
      }
      const auto out = env.step(s, executed);
      total_return += out.reward;
      ++steps;
      s = out.next_state;
    }
    const auto outcome = *lander::classify_outcome(s, env.params());
    ++res.outcomes[static_cast<std::size_t>(outcome)];
    if (outcome == lander::Outcome::landed_at_goal) ++res.successes;
  }
  res.mean_return = episodes ? total_return / episodes : 0.0;
  res.intervention_rate = steps ? static_cast<double>(interventions) / static_cast<double>(steps) : 0.0;
  return res;
}

}  // namespace ave::learn
