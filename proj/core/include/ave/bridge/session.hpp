#pragma once

// One live piloting session: a lander episode loop driven by human input,
// the copilot intervention rule, optional online fine-tuning, and the
// diversity bonus computed on a worker thread.
//
// The session is single-owner: tick() must be called from one thread. The
// bonus worker only sees state snapshots and hands values back by tick index.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ave/bridge/protocol.hpp"
#include "ave/harness/config.hpp"
#include "ave/learn/copilot.hpp"

namespace ave::bridge {

struct SessionOptions {
  std::string session_id = "session";
  std::string mode = "play";             // play | finetune
  std::string condition = "empowerment";  // empowerment | baseline
  lander::LanderParams physics;
  assist::CopilotConfig copilot;
  learn::RewardSpec reward;
  learn::TrainSchedule schedule;
  int tick_hz = 50;
  int bonus_lag = 2;
  double train_budget = 0.5;
  int max_backlog = 50;
  bool threaded_bonus = true;
  std::uint64_t seed = 1;
  /// Fine-tuned checkpoints are written here after every episode (empty: off).
  std::filesystem::path checkpoint_dir;

  void validate() const;
};

/// Options for a serve config. The seed mixes the first config seed with the
/// session id.
SessionOptions make_session_options(const harness::ExperimentConfig& cfg, const std::string& session_id);

struct SessionStats {
  std::uint64_t ticks = 0;
  std::uint64_t train_steps = 0;
  std::uint64_t deferred_steps = 0;  // tick-budget deferrals (each retried later)
  std::uint64_t dropped_steps = 0;   // backlog overflow
  std::uint64_t checkpoints = 0;
  int episodes = 0;  // completed
  int successes = 0;
  int max_bonus_staleness = 0;
};

/// Computes diversity bonuses for submitted snapshots in submission order,
/// on its own thread or inline.
class BonusWorker {
 public:
  BonusWorker(lander::LanderParams params, emp::EmpowermentQuery query, bool threaded);
  ~BonusWorker();
  BonusWorker(const BonusWorker&) = delete;
  BonusWorker& operator=(const BonusWorker&) = delete;

  void submit(std::uint64_t tick, const lander::LanderState& s, std::uint64_t seed);
  /// Blocks until the value for `tick` is ready.
  double wait(std::uint64_t tick);
  /// Forgets results older than `tick`.
  void discard_before(std::uint64_t tick);

 private:
  struct Job {
    std::uint64_t tick;
    lander::LanderState state;
    std::uint64_t seed;
  };
  double compute(const Job& job) const;
  void loop();

  lander::LanderEnv env_;
  emp::EmpowermentQuery query_;
  bool threaded_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Job> jobs_;
  std::map<std::uint64_t, double> done_;
  bool stop_ = false;
  std::thread thread_;
};

class Session {
 public:
  Session(SessionOptions options, learn::ValueApproximator copilot);
  ~Session();

  struct TickResult {
    std::optional<EpisodeEnd> episode_end;  // the previous episode, when it had ended
    Frame frame;
    std::optional<ActionId> input;  // latched input used this tick
    bool trained = false;
  };

  /// One physics step. `input` replaces the latched input when present.
  /// `force_train` overrides the tick-budget decision (log replay).
  TickResult tick(std::optional<ActionId> input, std::optional<bool> force_train = std::nullopt);

  Hello hello() const;
  ConfigMsg config() const;
  const SessionOptions& options() const { return options_; }
  const SessionStats& stats() const { return stats_; }
  const learn::ValueApproximator& copilot() const;
  const lander::LanderState& state() const { return state_; }
  int episode() const { return episode_; }
  std::size_t memory_size() const { return memory_.size(); }
  /// Waits for pending checkpoint writes.
  void flush();

 private:
  struct Pending {
    std::uint64_t tick;
    std::vector<double> obs;
    int action;
    double reward;
    std::optional<std::vector<double>> next_obs;
    bool done;
  };

  void end_episode(TickResult& out);
  void finalize_ready(std::uint64_t upto);
  void maybe_train(TickResult& out, std::optional<bool> force, double elapsed_ms);

  SessionOptions options_;
  lander::LanderEnv env_;
  learn::ValueApproximator net_;
  std::optional<learn::DqnLearner> learner_;
  BonusWorker bonus_;
  SeededRng reset_rng_;
  lander::ActionMemory memory_;
  lander::LanderState state_;
  std::optional<ActionId> latched_;
  std::deque<Pending> pending_;
  SessionStats stats_;
  std::uint64_t tick_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t episode_start_ = 0;
  std::uint64_t env_steps_ = 0;
  int episode_ = 0;
  int episode_steps_ = 0;
  double score_ = 0.0;
  std::int64_t owed_steps_ = 0;
  double step_ms_estimate_ = 0.0;
  std::vector<std::future<void>> saves_;
};

}  // namespace ave::bridge
