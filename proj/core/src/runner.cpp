#include "ave/harness/runner.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ave/errors.hpp"
#include "ave/harness/landscape.hpp"
#include "ave/harness/manifest.hpp"
#include "ave/harness/parallel.hpp"
#include "ave/harness/study.hpp"

namespace ave::harness {

namespace fs = std::filesystem;

namespace {

std::string landscape_file(std::uint64_t seed) { return "landscape-s" + std::to_string(seed) + ".csv"; }

void say(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

RunOutput run_gridworld(const ExperimentConfig& cfg, const ProgressFn& progress) {
  RunOutput out;
  say(progress, "gridworld: " + std::to_string(cfg.gridworld.trials) + " trials per condition and seed");
  const auto study = run_gridworld_study(cfg.gridworld, cfg.seeds);
  write_trials_csv(fs::path(cfg.out) / "trials.csv", study.trials);
  write_summary_csv(fs::path(cfg.out) / "summary.csv", study.summary);
  out.report = format_table(study.summary);
  std::ofstream(fs::path(cfg.out) / "summary.txt") << out.report;
  out.files = {"trials.csv", "summary.csv", "summary.txt"};
  return out;
}

RunOutput run_landscape(const ExperimentConfig& cfg, const ProgressFn& progress) {
  RunOutput out;
  for (const auto seed : cfg.seeds) {
    SeededRng rng(seed);
    const auto l = landscape_grid(cfg.landscape, rng);
    write_landscape_csv(fs::path(cfg.out) / landscape_file(seed), l);
    out.files.push_back(landscape_file(seed));
    out.report += "seed " + std::to_string(seed) + ": " + landscape_summary(l).substr(2) + "\n";
    say(progress, "landscape seed " + std::to_string(seed) + " written");
  }
  return out;
}

CheckpointLayout eval_layout(const ExperimentConfig& cfg) {
  return CheckpointLayout{cfg.lander.checkpoints.empty() ? fs::path(cfg.out) / "checkpoints"
                                                         : fs::path(cfg.lander.checkpoints)};
}

RunOutput run_lander_train(const ExperimentConfig& cfg, const ProgressFn& progress) {
  RunOutput out;
  train_lander(cfg.lander, cfg.seeds, CheckpointLayout{fs::path(cfg.out) / "checkpoints"}, fs::path(cfg.out) / "curves",
               progress);
  out.files = {"checkpoints", "curves"};
  out.report = "checkpoints written to " + (fs::path(cfg.out) / "checkpoints").string() + "\n";
  return out;
}

RunOutput run_lander_eval(const ExperimentConfig& cfg, const ProgressFn& progress) {
  RunOutput out;
  const auto res = run_cross_eval(cfg.lander, cfg.seeds, eval_layout(cfg), progress);
  write_cross_eval_csv(fs::path(cfg.out) / "cross_eval.csv", res.records);
  write_best_csv(fs::path(cfg.out) / "best.csv", res.best);
  out.report = format_cross_eval_table(res);
  std::ofstream(fs::path(cfg.out) / "best.txt") << out.report;
  out.files = {"cross_eval.csv", "best.csv", "best.txt"};
  return out;
}

RunOutput run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress) {
  RunOutput out;
  const auto res = sweep_c_emp(cfg.lander, cfg.seeds, progress);
  write_sweep_csv(fs::path(cfg.out) / "sweep.csv", res);
  std::ostringstream os;
  char buf[96];
  for (std::size_t g = 0; g < cfg.lander.sweep_grid.size(); ++g) {
    std::snprintf(buf, sizeof buf, "c_emp=%-8g success=%5.1f%%\n", cfg.lander.sweep_grid[g], 100.0 * res.mean_success[g]);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "best c_emp=%g (pilot %s)\n", res.best_c_emp, res.pilot.c_str());
  os << buf;
  out.report = os.str();
  out.files = {"sweep.csv"};
  return out;
}

// --- csv lookup -------------------------------------------------------------

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

bool same_value(const std::string& a, const std::string& b) {
  if (a == b) return true;
  char* ea = nullptr;
  char* eb = nullptr;
  const double da = std::strtod(a.c_str(), &ea);
  const double db = std::strtod(b.c_str(), &eb);
  return !a.empty() && !b.empty() && *ea == '\0' && *eb == '\0' && da == db;
}

std::string find_row(const fs::path& path, const std::map<std::string, std::string>& key) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string header;
  std::getline(in, header);
  const auto cols = split(header, ',');
  std::vector<std::pair<std::size_t, std::string>> want;
  for (const auto& [k, v] : key) {
    const auto it = std::find(cols.begin(), cols.end(), k);
    if (it == cols.end()) throw ConfigError("table " + path.filename().string() + " has no column '" + k + "'");
    want.emplace_back(static_cast<std::size_t>(it - cols.begin()), v);
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto parts = split(line, ',');
    bool ok = true;
    for (const auto& [idx, v] : want) ok = ok && idx < parts.size() && same_value(parts[idx], v);
    if (ok) return line;
  }
  throw ConfigError("no row in " + path.filename().string() + " matches the requested cell");
}

std::string nth_data_row(const fs::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  for (std::size_t k = 0; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (k++ == n) return line;
  }
  throw ConfigError("row " + std::to_string(n) + " not found in " + path.filename().string());
}

const std::string& need(const std::map<std::string, std::string>& key, const std::string& name) {
  const auto it = key.find(name);
  if (it == key.end()) throw ConfigError("cell key is missing '" + name + "'");
  return it->second;
}

std::uint64_t need_u64(const std::map<std::string, std::string>& key, const std::string& name) {
  const auto& s = need(key, name);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("'" + name + "' must be an unsigned integer");
  return v;
}

double need_double(const std::map<std::string, std::string>& key, const std::string& name) {
  const auto& s = need(key, name);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError("'" + name + "' must be a number");
  return v;
}

std::string table_file(const ExperimentConfig& cfg, const std::string& table,
                       const std::map<std::string, std::string>& key) {
  if (table == "trials") return "trials.csv";
  if (table == "summary") return "summary.csv";
  if (table == "landscape") return landscape_file(need_u64(key, "seed"));
  if (table == "cross_eval") return "cross_eval.csv";
  if (table == "sweep") return "sweep.csv";
  (void)cfg;
  throw ConfigError("unknown table '" + table + "'");
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  fs::create_directories(cfg.out);
  RunOutput out;
  switch (cfg.kind) {
    case ExperimentKind::gridworld: out = run_gridworld(cfg, progress); break;
    case ExperimentKind::pendulum_landscape: out = run_landscape(cfg, progress); break;
    case ExperimentKind::lander_train: out = run_lander_train(cfg, progress); break;
    case ExperimentKind::lander_eval: out = run_lander_eval(cfg, progress); break;
    case ExperimentKind::sweep: out = run_sweep(cfg, progress); break;
    case ExperimentKind::serve: throw ConfigError("serve is not a batch experiment");
  }
  out.dir = cfg.out;
  write_manifest(fs::path(cfg.out) / "manifest.json", make_manifest(cfg, out.files));
  out.files.push_back("manifest.json");
  return out;
}

std::string recompute_row(const ExperimentConfig& cfg, const std::string& table,
                          const std::map<std::string, std::string>& key) {
  if (table == "trials") {
    const auto cond = parse_condition(need(key, "condition"));
    const auto trial = static_cast<int>(need_u64(key, "trial"));
    return format_trial_row(
        run_gridworld_trial(cfg.gridworld, need(key, "scenario"), cond, need_u64(key, "seed"), trial));
  }
  if (table == "summary") {
    GridworldConfig g = cfg.gridworld;
    g.scenarios = {need(key, "scenario")};
    g.conditions = {parse_condition(need(key, "condition")).label()};
    const auto study = run_gridworld_study(g, cfg.seeds);
    return format_summary_csv_row(study.summary.front());
  }
  if (table == "landscape") {
    SeededRng rng(need_u64(key, "seed"));
    const auto i = need_u64(key, "i"), j = need_u64(key, "j");
    const auto thetas = theta_axis(cfg.landscape.theta_bins);
    const auto omegas = omega_axis(cfg.landscape.omega_bins, cfg.landscape.omega_extent * cfg.landscape.params.omega_scale());
    const double v = landscape_cell(cfg.landscape, rng, i, j);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", thetas[i], omegas[j], v);
    return buf;
  }
  if (table == "cross_eval") {
    const auto seed = need_u64(key, "seed");
    const auto& pilot = need(key, "pilot");
    const auto cond = parse_copilot_condition(need(key, "copilot"));
    const auto pilot_net = train_pilot_for_seed(cfg.lander, seed).net;
    if (cond == CopilotCondition::none)
      return format_cross_eval_row(evaluate_models(cfg.lander, seed, pilot, cond, "-", pilot_net, nullptr));
    const auto& tw = need(key, "trained_with");
    const auto copilot = train_copilot_for_seed(cfg.lander, pilot_net, tw, condition_c_emp(cfg.lander, cond), seed).net;
    return format_cross_eval_row(evaluate_models(cfg.lander, seed, pilot, cond, tw, pilot_net, &copilot));
  }
  if (table == "sweep") {
    const auto seed = need_u64(key, "seed");
    const auto pilot_net = train_pilot_for_seed(cfg.lander, seed).net;
    return format_sweep_row(run_sweep_point(cfg.lander, pilot_net, need_double(key, "c_emp"), seed));
  }
  throw ConfigError("unknown table '" + table + "'");
}

ReproResult repro(const ReproRequest& request) {
  const auto manifest = read_manifest(request.run_dir / "manifest.json");
  const auto cfg = manifest_config(manifest);
  ReproResult r;
  r.table = request.table;
  r.config_hash = manifest.config_hash;
  const auto path = request.run_dir / table_file(cfg, request.table, request.key);
  if (request.table == "landscape") {
    const auto i = need_u64(request.key, "i"), j = need_u64(request.key, "j");
    r.recorded = nth_data_row(path, i * static_cast<std::size_t>(cfg.landscape.omega_bins) + j);
  } else {
    r.recorded = find_row(path, request.key);
  }
  r.recomputed = recompute_row(cfg, request.table, request.key);
  r.match = r.recorded == r.recomputed;
  return r;
}

std::map<std::string, std::string> parse_cell_key(std::string_view text) {
  std::map<std::string, std::string> key;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto item = text.substr(start, end - start);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) throw ConfigError("cell key items look like name=value");
      key[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
    start = end + 1;
  }
  return key;
}

}  // namespace ave::harness
