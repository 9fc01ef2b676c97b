#include "ave/harness/manifest.hpp"

#include <fstream>

#include "ave/errors.hpp"

#ifndef AVE_VERSION
#define AVE_VERSION "0.0.0"
#endif
#ifndef AVE_GIT_REVISION
#define AVE_GIT_REVISION ""
#endif

namespace ave::harness {

using nlohmann::json;

std::string code_version() {
  std::string v = AVE_VERSION;
  const std::string rev = AVE_GIT_REVISION;
  if (!rev.empty()) v += "+g" + rev;
  return v;
}

RunManifest make_manifest(const ExperimentConfig& cfg, std::vector<std::string> outputs) {
  RunManifest m;
  m.version = code_version();
  m.kind = std::string(to_string(cfg.kind));
  m.preset = std::string(to_string(cfg.preset));
  m.config_hash = config_hash(cfg);
  m.config = to_json(cfg);
  m.seeds = cfg.seeds;
  m.outputs = std::move(outputs);
  return m;
}

json to_json(const RunManifest& m) {
  return json{{"version", m.version}, {"kind", m.kind},     {"preset", m.preset}, {"config_hash", m.config_hash},
              {"config", m.config},   {"seeds", m.seeds}, {"outputs", m.outputs}};
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.version = j.at("version").get<std::string>();
    m.kind = j.at("kind").get<std::string>();
    m.preset = j.at("preset").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config = j.at("config");
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(m).dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

ExperimentConfig manifest_config(const RunManifest& m) {
  const auto kind = parse_experiment_kind(m.kind);
  auto cfg = apply_overrides(default_config(kind, parse_preset(m.preset)), m.config);
  const auto hash = config_hash(cfg);
  if (hash != m.config_hash)
    throw ConfigError("manifest config hashes to " + hash + ", recorded " + m.config_hash);
  return cfg;
}

}  // namespace ave::harness
