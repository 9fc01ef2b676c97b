#pragma once

// Shared-autonomy loops on the lander: simulated pilots, the copilot's
// per-step decision, training with the augmented reward, and greedy
// evaluation.

#include <array>
#include <optional>

#include "ave/assist.hpp"
#include "ave/lander.hpp"
#include "ave/learn/dqn.hpp"

namespace ave::learn {

/// A simulated pilot with its own previous-action register. Laggy, noisy and
/// optimal pilots corrupt the greedy action of `optimal` (observation with
/// the goal); noop and sensor pilots ignore it.
class SimulatedPilot {
 public:
  SimulatedPilot(assist::PilotConfig config, const ValueApproximator* optimal, const lander::LanderParams& params);

  ActionId act(const lander::LanderState& s, SeededRng& rng);
  void reset() { prev_ = lander::kAllOff; }
  const assist::PilotConfig& config() const { return config_; }

 private:
  assist::PilotConfig config_;
  const ValueApproximator* optimal_;
  lander::LanderParams params_;
  ActionId prev_ = lander::kAllOff;
};

struct CopilotDecision {
  std::vector<double> obs;  // copilot observation including the current input
  std::vector<double> q;
  assist::Intervention intervention;
};

/// Records `user` in `memory`, encodes the copilot observation and applies
/// the intervention rule on the current Q-values.
CopilotDecision copilot_decide(const ValueApproximator& copilot, const lander::LanderState& s,
                               lander::ActionMemory& memory, ActionId user, const assist::CopilotConfig& config);

/// Sub-streams forked from the caller's generator.
enum Stream : std::uint64_t { init = 1, resets = 2, pilot = 3, explore = 4, replay = 5, bonus = 6 };

/// Copilot training: the pilot proposes, the copilot intervenes (or explores
/// with probability epsilon), and the transition is stored with reward
/// R_original + c_emp * diversity_bonus(next state). The bonus is always
/// computed so runs that differ only in c_emp share every random stream.
/// `init` overrides the fresh initialization (fine-tuning).
TrainResult train_copilot(const lander::LanderEnv& env, SimulatedPilot pilot, const assist::CopilotConfig& copilot,
                          const RewardSpec& reward, const TrainSchedule& schedule, const SeededRng& rng,
                          const ValueApproximator* init = nullptr);

/// The goal-aware pilot: same learner on the pilot observation, task reward
/// only.
TrainResult train_optimal_pilot(const lander::LanderEnv& env, const TrainSchedule& schedule, double gamma,
                                const SeededRng& rng);

struct EvalResult {
  int episodes = 0;
  int successes = 0;
  std::array<int, 5> outcomes{};  // indexed by lander::Outcome
  double mean_return = 0.0;
  double intervention_rate = 0.0;

  double success_rate() const { return episodes ? static_cast<double>(successes) / episodes : 0.0; }
};

/// Greedy evaluation. Without a copilot the pilot's action is executed as is.
EvalResult evaluate(const lander::LanderEnv& env, SimulatedPilot pilot, const ValueApproximator* copilot,
                    const assist::CopilotConfig& config, int episodes, const SeededRng& rng);

}  // namespace ave::learn
