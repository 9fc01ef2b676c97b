#pragma once

// Run manifest written next to every experiment's outputs. It carries the
// full config dump, its hash, the seeds and the code version, which is all
// `repro` needs to re-derive any emitted table cell.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ave/harness/config.hpp"

namespace ave::harness {

/// Library version, with the git revision when the build knew it.
std::string code_version();

struct RunManifest {
  std::string version;
  std::string kind;
  std::string preset;
  std::string config_hash;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;  // file names relative to the run directory
};

RunManifest make_manifest(const ExperimentConfig& cfg, std::vector<std::string> outputs);

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// Rebuilds the config from the manifest dump. Throws ConfigError when the
/// rebuilt config does not hash to the recorded value.
ExperimentConfig manifest_config(const RunManifest& m);

}  // namespace ave::harness
