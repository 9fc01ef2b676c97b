#pragma once

// Lander experiments: per-seed training of the optimal pilot and of one
// baseline and one empowerment copilot per simulated pilot, the pilot x
// copilot cross evaluation, and the c_emp sweep.
//
// Random streams depend on (seed, role, pilot) only. The baseline and
// empowerment copilots trained with the same pilot therefore share every
// stream, and a sweep point at c_emp = 0 is the baseline copilot bit for bit.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ave/harness/config.hpp"
#include "ave/learn/copilot.hpp"

namespace ave::harness {

enum class CopilotCondition : std::uint8_t { none, baseline, empowerment };
CopilotCondition parse_copilot_condition(std::string_view name);
std::string_view to_string(CopilotCondition c);

/// Checkpoint files of a training run:
///   <root>/seed-<s>/pilot.aveq
///   <root>/seed-<s>/copilot-<trained_with>-<condition>.aveq
struct CheckpointLayout {
  std::filesystem::path root;

  std::filesystem::path pilot(std::uint64_t seed) const;
  std::filesystem::path copilot(std::uint64_t seed, std::string_view trained_with, CopilotCondition c) const;
};

SeededRng pilot_training_rng(std::uint64_t seed);
SeededRng copilot_training_rng(std::uint64_t seed, std::string_view trained_with);
SeededRng evaluation_rng(std::uint64_t seed, std::string_view eval_pilot);

learn::TrainResult train_pilot_for_seed(const LanderConfig& cfg, std::uint64_t seed);
learn::TrainResult train_copilot_for_seed(const LanderConfig& cfg, const learn::ValueApproximator& pilot,
                                          std::string_view trained_with, double c_emp, std::uint64_t seed);
double condition_c_emp(const LanderConfig& cfg, CopilotCondition c);

using ProgressFn = std::function<void(const std::string&)>;

/// Trains every model of every seed and writes checkpoints under `layout`
/// and training curves under `curves_dir/seed-<s>/`.
void train_lander(const LanderConfig& cfg, const std::vector<std::uint64_t>& seeds, const CheckpointLayout& layout,
                  const std::filesystem::path& curves_dir, const ProgressFn& progress = {});

struct CrossEvalRecord {
  std::uint64_t seed = 0;
  std::string pilot;         // evaluation pilot ("optimal" for the full pilot)
  std::string copilot;       // none | baseline | empowerment
  std::string trained_with;  // pilot the copilot was trained with, "-" for none
  learn::EvalResult eval;
};

/// Seed-averaged success of one (pilot, copilot, trained_with) cell.
struct CrossEvalCell {
  std::string pilot;
  std::string copilot;
  std::string trained_with;
  std::vector<double> per_seed;  // success rates in seed order
  double mean = 0.0;
};

struct CrossEvalResult {
  std::vector<CrossEvalRecord> records;
  std::vector<CrossEvalCell> cells;
  /// One row per (pilot, copilot): the best trained_with by mean success.
  std::vector<CrossEvalCell> best;

  const CrossEvalCell* find_best(std::string_view pilot, std::string_view copilot) const;
};

/// One evaluation from in-memory networks (`copilot_net` null for none).
CrossEvalRecord evaluate_models(const LanderConfig& cfg, std::uint64_t seed, const std::string& pilot,
                                CopilotCondition copilot, const std::string& trained_with,
                                const learn::ValueApproximator& pilot_net, const learn::ValueApproximator* copilot_net);

/// One evaluation from checkpoints. Throws IoError naming the cell when a checkpoint is missing.
CrossEvalRecord evaluate_cell(const LanderConfig& cfg, const CheckpointLayout& layout, std::uint64_t seed,
                              const std::string& pilot, CopilotCondition copilot, const std::string& trained_with);

/// Every pilot against no copilot and against every trained copilot, plus the
/// optimal pilot alone.
CrossEvalResult run_cross_eval(const LanderConfig& cfg, const std::vector<std::uint64_t>& seeds,
                               const CheckpointLayout& layout, const ProgressFn& progress = {});

std::string format_cross_eval_row(const CrossEvalRecord& r);
void write_cross_eval_csv(const std::filesystem::path& path, const std::vector<CrossEvalRecord>& records);
std::string format_best_row(const CrossEvalCell& c);
void write_best_csv(const std::filesystem::path& path, const std::vector<CrossEvalCell>& cells);
std::string format_cross_eval_table(const CrossEvalResult& r);

struct SweepRecord {
  std::uint64_t seed = 0;
  double c_emp = 0.0;
  learn::EvalResult eval;
};

struct SweepResult {
  std::string pilot;
  std::vector<SweepRecord> records;  // grid-major, seeds inner
  std::vector<double> mean_success;  // per grid value
  double best_c_emp = 0.0;
};

/// One sweep row: copilot trained with the sweep pilot at `c_emp`, evaluated
/// with the same pilot.
SweepRecord run_sweep_point(const LanderConfig& cfg, const learn::ValueApproximator& pilot, double c_emp,
                            std::uint64_t seed);
SweepResult sweep_c_emp(const LanderConfig& cfg, const std::vector<std::uint64_t>& seeds,
                        const ProgressFn& progress = {});

std::string format_sweep_row(const SweepRecord& r);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& r);

}  // namespace ave::harness
