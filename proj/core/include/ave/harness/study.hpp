#pragma once

// Gridworld assistance study: trap scenarios with randomized goals, run under
// each assistant condition. Trials are paired across conditions: trial k of
// every condition sees the same corner and goal.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ave/harness/config.hpp"

namespace ave::harness {

enum class Method : std::uint8_t { gi_known, gi_unknown, empowerment, proxy, oracle };
enum class GoalSet : std::uint8_t { large, small, none };

struct Condition {
  Method method = Method::oracle;
  GoalSet goal_set = GoalSet::none;

  /// Label as written in configs, e.g. "gi-unknown/sg".
  std::string label() const;
  friend bool operator==(const Condition&, const Condition&) = default;
};

/// "method/goal-set". Goal-inference methods take lg or sg, the others ng;
/// any other pairing is a ConfigError.
Condition parse_condition(std::string_view text);

struct TrialRecord {
  std::uint64_t seed = 0;  // the study seed
  int trial = 0;
  std::string scenario;
  std::string condition;
  bool success = false;
  std::optional<int> steps_to_goal;  // present iff success
  /// success | timeout | blocked_goal (timed out with a block on the goal)
  std::string outcome;
};

struct ConditionSummary {
  std::string scenario;
  std::string condition;
  int trials = 0;
  int successes = 0;
  int blocked_goal = 0;
  double success_rate = 0.0;  // successes / trials
  double mean_steps = 0.0;    // over successful trials only; 0 when none
};

struct StudyResult {
  std::vector<TrialRecord> trials;
  std::vector<ConditionSummary> summary;
};

/// The trap layout and goal of trial `trial` (shared by every condition).
grid::GridScenario trial_scenario(const GridworldConfig& cfg, const std::string& scenario, std::uint64_t seed,
                                  int trial);

TrialRecord run_gridworld_trial(const GridworldConfig& cfg, const std::string& scenario, const Condition& condition,
                                std::uint64_t seed, int trial);

/// One summary row from a condition's trials.
ConditionSummary summarize(const std::vector<TrialRecord>& trials, const std::string& scenario,
                           const std::string& condition);

/// Trials ordered scenario-major, then condition, seed, trial.
StudyResult run_gridworld_study(const GridworldConfig& cfg, const std::vector<std::uint64_t>& seeds);
StudyResult run_gridworld_study(const GridworldConfig& cfg, std::uint64_t seed);

std::string format_trial_row(const TrialRecord& t);
void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& trials);
void write_summary_csv(const std::filesystem::path& path, const std::vector<ConditionSummary>& rows);
std::string format_summary_csv_row(const ConditionSummary& row);
std::string format_table(const std::vector<ConditionSummary>& rows);

}  // namespace ave::harness
