#pragma once

// Temporal-difference learning with a hard-synced target copy, plus the
// empowerment-augmented reward R = R_original + c_emp * E_human.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ave/empowerment.hpp"
#include "ave/learn/network.hpp"
#include "ave/learn/replay.hpp"

namespace ave::learn {

struct RewardSpec {
  double c_emp = 0.001;
  double gamma = 0.99;
  /// Diversity bonus on the post-transition state: 10 rollouts, 15 steps,
  /// final (x, y).
  emp::EmpowermentQuery emp_query = lander_bonus_query();

  static emp::EmpowermentQuery lander_bonus_query();
  void validate() const;
};

struct TrainSchedule {
  int episodes = 500;
  int max_steps = 1000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Fraction of the episodes over which epsilon decays linearly.
  double epsilon_decay_fraction = 0.3;
  int target_sync_interval = 1000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int hidden = 64;
  std::size_t buffer_capacity = 50000;
  int learning_starts = 1000;
  int train_every = 1;
  /// Rescales the gradient to at most this global L2 norm; 0 disables.
  double grad_clip = 0.0;

  void validate() const;
  double epsilon(int episode) const;
};

double augmented_reward(double r_original, double emp_value, const RewardSpec& spec);

/// reward if done, else reward + gamma * max_a target_q(next_obs)[a].
double td_target(double reward, std::span<const double> next_obs, bool done, const ValueApproximator& target_q,
                 double gamma);
Eigen::VectorXd td_targets(const Batch& batch, const ValueApproximator& target_q, double gamma);

/// One Adam step on the mean squared TD error of `batch`. Returns the loss
/// before the step. Throws DivergenceError on a non-finite loss.
double train_step(ValueApproximator& q, const ValueApproximator& target_q, const Batch& batch, double gamma,
                  Adam& optimizer, double grad_clip = 0.0);

int greedy_action(const ValueApproximator& q, std::span<const double> obs);

/// Online network, target copy, optimizer and replay buffer.
class DqnLearner {
 public:
  DqnLearner(ValueApproximator init, const TrainSchedule& schedule, double gamma, int obs_dim, SeededRng replay_rng);

  void store(std::span<const double> obs, int action, double reward, std::span<const double> next_obs, bool done);
  bool ready() const;
  /// One train_step on a fresh batch; hard-syncs the target every
  /// target_sync_interval gradient steps.
  double learn();

  const ValueApproximator& online() const { return q_; }
  const ValueApproximator& target() const { return target_; }
  std::int64_t gradient_steps() const { return steps_; }
  std::size_t buffered() const { return buffer_.size(); }

 private:
  ValueApproximator q_;
  ValueApproximator target_;
  Adam adam_;
  ReplayBuffer buffer_;
  TrainSchedule schedule_;
  double gamma_;
  SeededRng replay_rng_;
  std::int64_t steps_ = 0;
};

// Checkpoint layout v1 (little-endian):
//   "AVEQ" | u32 version = 1 | u32 input | u32 hidden | u32 outputs |
//   u64 parameter count | f64 parameters (network order)
Bytes encode_checkpoint(const ValueApproximator& net);
ValueApproximator decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const ValueApproximator& net);
ValueApproximator load_checkpoint(const std::filesystem::path& path);

struct EpisodeLog {
  int episode = 0;
  double ret = 0.0;
  bool success = false;
  double loss = 0.0;  // mean training loss over the episode (0 before learning starts)
  double mean_bonus = 0.0;
  std::string outcome;
  int steps = 0;
};

struct TrainResult {
  ValueApproximator net;
  std::vector<EpisodeLog> curve;
  /// Set when training stopped early (divergence); `net` is the last good state.
  std::optional<std::string> error;
};

/// episode,return,success,loss,mean_bonus
void write_curve_csv(const std::filesystem::path& path, const std::vector<EpisodeLog>& curve);

}  // namespace ave::learn
