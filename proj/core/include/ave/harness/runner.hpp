#pragma once

// Runs one experiment end to end (tables + manifest in the output
// directory) and re-derives single table cells from a finished run.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ave/harness/config.hpp"
#include "ave/harness/cross_eval.hpp"

namespace ave::harness {

struct RunOutput {
  std::filesystem::path dir;
  std::vector<std::string> files;  // relative to dir, manifest.json last
  std::string report;              // human-readable table
};

/// Every kind except serve. Writes into cfg.out.
RunOutput run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Table names and their cell keys:
///   trials      seed, scenario, condition, trial
///   summary     scenario, condition
///   landscape   seed, i (theta index), j (omega index)
///   cross_eval  seed, pilot, copilot, trained_with
///   sweep       seed, c_emp
struct ReproRequest {
  std::filesystem::path run_dir;
  std::string table;
  std::map<std::string, std::string> key;
};

struct ReproResult {
  std::string table;
  std::string config_hash;
  std::string recorded;    // row as emitted
  std::string recomputed;  // row re-derived from (config, seed)
  bool match = false;
};

ReproResult repro(const ReproRequest& request);

/// Recomputes a row without consulting the emitted file.
std::string recompute_row(const ExperimentConfig& cfg, const std::string& table,
                          const std::map<std::string, std::string>& key);

/// Parses "a=1,b=x" into a key map.
std::map<std::string, std::string> parse_cell_key(std::string_view text);

}  // namespace ave::harness
