#pragma once

// Experiment configuration. Every field has a default; a config file only
// lists overrides. Files are JSON objects; unknown keys are rejected so a
// typo never silently falls back to a default.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ave/assist.hpp"
#include "ave/empowerment.hpp"
#include "ave/lander.hpp"
#include "ave/learn/dqn.hpp"
#include "ave/pendulum.hpp"

namespace ave::harness {

enum class ExperimentKind : std::uint8_t { gridworld, lander_train, lander_eval, sweep, pendulum_landscape, serve };

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);

enum class Preset : std::uint8_t { quick, paper };
Preset parse_preset(std::string_view name);
std::string_view to_string(Preset preset);

struct GridworldConfig {
  int width = 6;
  int height = 6;
  int timeout = 1000;
  int trials = 100;
  double beta = 5.0;
  std::vector<std::string> scenarios{"corner", "center"};
  /// "method/goal-set": gi-known/lg, gi-known/sg, gi-unknown/lg,
  /// gi-unknown/sg, empowerment/ng, proxy/ng, oracle/ng.
  std::vector<std::string> conditions{"gi-known/lg", "gi-known/sg", "gi-unknown/lg", "gi-unknown/sg",
                                      "empowerment/ng", "proxy/ng",    "oracle/ng"};
  emp::EmpowermentQuery exact_query = default_exact_query();
  emp::EmpowermentQuery proxy_query = default_proxy_query();

  static emp::EmpowermentQuery default_exact_query();
  static emp::EmpowermentQuery default_proxy_query();
  void validate() const;
};

struct LanderConfig {
  lander::LanderParams physics;
  learn::TrainSchedule pilot_schedule;
  learn::TrainSchedule copilot_schedule = default_copilot_schedule();
  double pilot_gamma = 0.99;
  learn::RewardSpec reward;
  assist::CopilotConfig copilot;
  double lag_prob = 0.85;
  double noise_prob = 0.3;
  int eval_episodes = 100;
  std::vector<std::string> pilots{"noop", "laggy", "noisy", "sensor"};
  /// Pilot whose copilots the c_emp sweep trains.
  std::string sweep_pilot = "noisy";
  std::vector<double> sweep_grid{0.0, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  /// Directory holding checkpoints for lander-eval (defaults to the run dir).
  std::string checkpoints;

  static learn::TrainSchedule default_copilot_schedule();
  assist::PilotConfig pilot_config(assist::PilotKind kind) const;
  void validate() const;
};

struct LandscapeConfig {
  pendulum::PendulumParams params;
  int theta_bins = 36;
  int omega_bins = 37;
  /// Half-width of the omega axis in units of sqrt(g / l).
  double omega_extent = 3.0;
  emp::EmpowermentQuery query = default_query();

  static emp::EmpowermentQuery default_query();
  void validate() const;
};

struct ServeConfig {
  int port = 8765;
  std::string copilot_checkpoint;
  std::string mode = "play";  // play | finetune
  std::string condition = "empowerment";
  int tick_hz = 50;
  std::string log_dir = "sessions";
  /// Frames report the bonus of the state this many ticks back (at most 3).
  int bonus_lag = 2;
  /// Fraction of the tick period a fine-tuning step may use.
  double train_budget = 0.5;
  /// Deferred training steps kept before the oldest are dropped (and counted).
  int max_backlog = 50;
  void validate() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::gridworld;
  Preset preset = Preset::quick;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string out = "runs/out";
  GridworldConfig gridworld;
  LanderConfig lander;
  LandscapeConfig landscape;
  ServeConfig serve;

  void validate() const;
};

/// Defaults for a kind under a preset.
ExperimentConfig default_config(ExperimentKind kind, Preset preset);

/// Applies the overrides in `j` on top of `base`. Throws ConfigError on
/// unknown keys or ill-typed values.
ExperimentConfig apply_overrides(ExperimentConfig base, const nlohmann::json& j);

/// Full dump with every default spelled out. Key order is fixed, so the
/// dump is canonical.
nlohmann::json to_json(const ExperimentConfig& c);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

ExperimentConfig load_config(const std::string& path, ExperimentKind kind, Preset preset);

}  // namespace ave::harness
