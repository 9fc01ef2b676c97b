#include "ave/harness/cross_eval.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "ave/errors.hpp"
#include "ave/harness/parallel.hpp"
#include "ave/serial.hpp"

namespace ave::harness {

using assist::PilotKind;

CopilotCondition parse_copilot_condition(std::string_view name) {
  if (name == "none") return CopilotCondition::none;
  if (name == "baseline") return CopilotCondition::baseline;
  if (name == "empowerment") return CopilotCondition::empowerment;
  throw ConfigError("unknown copilot condition '" + std::string(name) + "'");
}

std::string_view to_string(CopilotCondition c) {
  switch (c) {
    case CopilotCondition::none: return "none";
    case CopilotCondition::baseline: return "baseline";
    case CopilotCondition::empowerment: return "empowerment";
  }
  return "?";
}

std::filesystem::path CheckpointLayout::pilot(std::uint64_t seed) const {
  return root / ("seed-" + std::to_string(seed)) / "pilot.aveq";
}

std::filesystem::path CheckpointLayout::copilot(std::uint64_t seed, std::string_view trained_with,
                                                CopilotCondition c) const {
  return root / ("seed-" + std::to_string(seed)) /
         ("copilot-" + std::string(trained_with) + "-" + std::string(to_string(c)) + ".aveq");
}

SeededRng pilot_training_rng(std::uint64_t seed) { return SeededRng(derive_seed(seed, fnv1a64("pilot"))); }

SeededRng copilot_training_rng(std::uint64_t seed, std::string_view trained_with) {
  return SeededRng(derive_seed(derive_seed(seed, fnv1a64("copilot")), fnv1a64(trained_with)));
}

SeededRng evaluation_rng(std::uint64_t seed, std::string_view eval_pilot) {
  return SeededRng(derive_seed(derive_seed(seed, fnv1a64("eval")), fnv1a64(eval_pilot)));
}

learn::TrainResult train_pilot_for_seed(const LanderConfig& cfg, std::uint64_t seed) {
  const lander::LanderEnv env(cfg.physics);
  return learn::train_optimal_pilot(env, cfg.pilot_schedule, cfg.pilot_gamma, pilot_training_rng(seed));
}

learn::TrainResult train_copilot_for_seed(const LanderConfig& cfg, const learn::ValueApproximator& pilot,
                                          std::string_view trained_with, double c_emp, std::uint64_t seed) {
  const lander::LanderEnv env(cfg.physics);
  learn::SimulatedPilot sim(cfg.pilot_config(assist::parse_pilot_kind(trained_with)), &pilot, cfg.physics);
  learn::RewardSpec reward = cfg.reward;
  reward.c_emp = c_emp;
  return learn::train_copilot(env, std::move(sim), cfg.copilot, reward, cfg.copilot_schedule,
                              copilot_training_rng(seed, trained_with));
}

double condition_c_emp(const LanderConfig& cfg, CopilotCondition c) {
  return c == CopilotCondition::empowerment ? cfg.reward.c_emp : 0.0;
}

namespace {

constexpr std::array<CopilotCondition, 2> kTrained{CopilotCondition::baseline, CopilotCondition::empowerment};

ProgressFn locked(const ProgressFn& progress) {
  if (!progress) return [](const std::string&) {};
  auto mu = std::make_shared<std::mutex>();
  return [mu, progress](const std::string& msg) {
    std::lock_guard lock(*mu);
    progress(msg);
  };
}

learn::ValueApproximator load_for_cell(const std::filesystem::path& path, const std::string& cell) {
  if (!std::filesystem::exists(path)) throw IoError("missing checkpoint for cell " + cell + ": " + path.string());
  return learn::load_checkpoint(path);
}

std::string cell_name(std::uint64_t seed, std::string_view pilot, CopilotCondition c, std::string_view trained_with) {
  return "(seed=" + std::to_string(seed) + " pilot=" + std::string(pilot) + " copilot=" + std::string(to_string(c)) +
         " trained_with=" + std::string(trained_with) + ")";
}

}  // namespace

void train_lander(const LanderConfig& cfg, const std::vector<std::uint64_t>& seeds, const CheckpointLayout& layout,
                  const std::filesystem::path& curves_dir, const ProgressFn& progress) {
  cfg.validate();
  const auto report = locked(progress);
  parallel_for(seeds.size(), [&](std::size_t k) {
    const std::uint64_t seed = seeds[k];
    const auto seed_curves = curves_dir / ("seed-" + std::to_string(seed));
    std::filesystem::create_directories(layout.pilot(seed).parent_path());
    std::filesystem::create_directories(seed_curves);
    std::vector<std::string> errors;

    auto pilot = train_pilot_for_seed(cfg, seed);
    learn::save_checkpoint(layout.pilot(seed), pilot.net);
    learn::write_curve_csv(seed_curves / "pilot.csv", pilot.curve);
    if (pilot.error) errors.push_back("pilot: " + *pilot.error);
    report("seed " + std::to_string(seed) + ": optimal pilot trained");

    for (const auto& name : cfg.pilots)
      for (const auto cond : kTrained) {
        auto res = train_copilot_for_seed(cfg, pilot.net, name, condition_c_emp(cfg, cond), seed);
        learn::save_checkpoint(layout.copilot(seed, name, cond), res.net);
        learn::write_curve_csv(seed_curves / ("copilot-" + name + "-" + std::string(to_string(cond)) + ".csv"),
                               res.curve);
        if (res.error) errors.push_back(name + "/" + std::string(to_string(cond)) + ": " + *res.error);
        report("seed " + std::to_string(seed) + ": copilot " + name + "/" + std::string(to_string(cond)) +
               " trained");
      }
    if (!errors.empty()) {
      std::ofstream out(seed_curves / "errors.txt");
      for (const auto& e : errors) out << e << '\n';
      for (const auto& e : errors) report("seed " + std::to_string(seed) + ": training stopped early, " + e);
    }
  }, 0);
}

const CrossEvalCell* CrossEvalResult::find_best(std::string_view pilot, std::string_view copilot) const {
  for (const auto& c : best)
    if (c.pilot == pilot && c.copilot == copilot) return &c;
  return nullptr;
}

CrossEvalRecord evaluate_models(const LanderConfig& cfg, std::uint64_t seed, const std::string& pilot,
                                CopilotCondition copilot, const std::string& trained_with,
                                const learn::ValueApproximator& pilot_net, const learn::ValueApproximator* copilot_net) {
  const lander::LanderEnv env(cfg.physics);
  learn::SimulatedPilot sim(cfg.pilot_config(assist::parse_pilot_kind(pilot)), &pilot_net, cfg.physics);
  CrossEvalRecord r;
  r.seed = seed;
  r.pilot = pilot;
  r.copilot = std::string(to_string(copilot));
  r.trained_with = copilot == CopilotCondition::none ? "-" : trained_with;
  r.eval = learn::evaluate(env, std::move(sim), copilot == CopilotCondition::none ? nullptr : copilot_net,
                           cfg.copilot, cfg.eval_episodes, evaluation_rng(seed, pilot));
  return r;
}

CrossEvalRecord evaluate_cell(const LanderConfig& cfg, const CheckpointLayout& layout, std::uint64_t seed,
                              const std::string& pilot, CopilotCondition copilot, const std::string& trained_with) {
  const std::string cell = cell_name(seed, pilot, copilot, trained_with);
  const auto pilot_net = load_for_cell(layout.pilot(seed), cell);
  std::optional<learn::ValueApproximator> copilot_net;
  if (copilot != CopilotCondition::none)
    copilot_net = load_for_cell(layout.copilot(seed, trained_with, copilot), cell);
  return evaluate_models(cfg, seed, pilot, copilot, trained_with, pilot_net, copilot_net ? &*copilot_net : nullptr);
}

CrossEvalResult run_cross_eval(const LanderConfig& cfg, const std::vector<std::uint64_t>& seeds,
                               const CheckpointLayout& layout, const ProgressFn& progress) {
  cfg.validate();
  struct Task {
    std::string pilot;
    CopilotCondition copilot;
    std::string trained_with;
  };
  std::vector<Task> per_seed{{"optimal", CopilotCondition::none, "-"}};
  for (const auto& p : cfg.pilots) {
    per_seed.push_back({p, CopilotCondition::none, "-"});
    for (const auto& tw : cfg.pilots)
      for (const auto cond : kTrained) per_seed.push_back({p, cond, tw});
  }

  CrossEvalResult out;
  out.records.resize(seeds.size() * per_seed.size());
  const auto report = locked(progress);
  parallel_for(out.records.size(), [&](std::size_t k) {
    const auto seed = seeds[k / per_seed.size()];
    const auto& t = per_seed[k % per_seed.size()];
    out.records[k] = evaluate_cell(cfg, layout, seed, t.pilot, t.copilot, t.trained_with);
    report("evaluated " + cell_name(seed, t.pilot, t.copilot, t.trained_with));
  }, 0);

  for (std::size_t t = 0; t < per_seed.size(); ++t) {
    CrossEvalCell cell;
    cell.pilot = per_seed[t].pilot;
    cell.copilot = std::string(to_string(per_seed[t].copilot));
    cell.trained_with = per_seed[t].trained_with;
    for (std::size_t s = 0; s < seeds.size(); ++s)
      cell.per_seed.push_back(out.records[s * per_seed.size() + t].eval.success_rate());
    double sum = 0.0;
    for (double v : cell.per_seed) sum += v;
    cell.mean = seeds.empty() ? 0.0 : sum / static_cast<double>(seeds.size());
    out.cells.push_back(std::move(cell));
  }

  for (const auto& cell : out.cells) {
    auto it = std::find_if(out.best.begin(), out.best.end(),
                           [&](const CrossEvalCell& b) { return b.pilot == cell.pilot && b.copilot == cell.copilot; });
    if (it == out.best.end())
      out.best.push_back(cell);
    else if (cell.mean > it->mean)
      *it = cell;
  }
  return out;
}

std::string format_cross_eval_row(const CrossEvalRecord& r) {
  char buf[512];
  const auto& o = r.eval.outcomes;
  std::snprintf(buf, sizeof buf, "%llu,%s,%s,%s,%d,%d,%.17g,%d,%d,%d,%d,%.17g,%.17g",
                static_cast<unsigned long long>(r.seed), r.pilot.c_str(), r.copilot.c_str(), r.trained_with.c_str(),
                r.eval.episodes, r.eval.successes, r.eval.success_rate(), o[1], o[2], o[3], o[4],
                r.eval.intervention_rate, r.eval.mean_return);
  return buf;
}

void write_cross_eval_csv(const std::filesystem::path& path, const std::vector<CrossEvalRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "seed,pilot,copilot,trained_with,episodes,successes,success_rate,landed_off_goal,crash,out_of_bounds,"
         "timeout,intervention_rate,mean_return\n";
  for (const auto& r : records) out << format_cross_eval_row(r) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

std::string format_best_row(const CrossEvalCell& c) {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", c.mean);
  os << c.pilot << ',' << c.copilot << ',' << c.trained_with << ',' << buf << ',';
  for (std::size_t i = 0; i < c.per_seed.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", c.per_seed[i]);
    os << (i ? ";" : "") << buf;
  }
  return os.str();
}

void write_best_csv(const std::filesystem::path& path, const std::vector<CrossEvalCell>& cells) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "pilot,copilot,trained_with,mean_success_rate,per_seed\n";
  for (const auto& c : cells) out << format_best_row(c) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

std::string format_cross_eval_table(const CrossEvalResult& r) {
  std::vector<std::string> pilots;
  for (const auto& c : r.best)
    if (std::find(pilots.begin(), pilots.end(), c.pilot) == pilots.end()) pilots.push_back(c.pilot);
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-12s", "copilot");
  os << buf;
  for (const auto& p : pilots) {
    std::snprintf(buf, sizeof buf, " %9s", p.c_str());
    os << buf;
  }
  os << '\n';
  for (const char* cond : {"none", "baseline", "empowerment"}) {
    std::snprintf(buf, sizeof buf, "%-12s", cond);
    os << buf;
    for (const auto& p : pilots) {
      const auto* c = r.find_best(p, cond);
      if (c)
        std::snprintf(buf, sizeof buf, " %9.1f", 100.0 * c->mean);
      else
        std::snprintf(buf, sizeof buf, " %9s", "");
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

SweepRecord run_sweep_point(const LanderConfig& cfg, const learn::ValueApproximator& pilot, double c_emp,
                            std::uint64_t seed) {
  const auto trained = train_copilot_for_seed(cfg, pilot, cfg.sweep_pilot, c_emp, seed);
  const lander::LanderEnv env(cfg.physics);
  learn::SimulatedPilot sim(cfg.pilot_config(assist::parse_pilot_kind(cfg.sweep_pilot)), &pilot, cfg.physics);
  SweepRecord r;
  r.seed = seed;
  r.c_emp = c_emp;
  r.eval = learn::evaluate(env, std::move(sim), &trained.net, cfg.copilot, cfg.eval_episodes,
                           evaluation_rng(seed, cfg.sweep_pilot));
  return r;
}

SweepResult sweep_c_emp(const LanderConfig& cfg, const std::vector<std::uint64_t>& seeds,
                        const ProgressFn& progress) {
  cfg.validate();
  const auto report = locked(progress);
  std::vector<std::optional<learn::ValueApproximator>> pilots(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    pilots[k] = train_pilot_for_seed(cfg, seeds[k]).net;
    report("seed " + std::to_string(seeds[k]) + ": optimal pilot trained");
  }, 0);

  SweepResult out;
  out.pilot = cfg.sweep_pilot;
  const std::size_t n = cfg.sweep_grid.size() * seeds.size();
  out.records.resize(n);
  parallel_for(n, [&](std::size_t k) {
    const std::size_t g = k / seeds.size(), s = k % seeds.size();
    out.records[k] = run_sweep_point(cfg, *pilots[s], cfg.sweep_grid[g], seeds[s]);
    char buf[96];
    std::snprintf(buf, sizeof buf, "seed %llu: c_emp=%g done", static_cast<unsigned long long>(seeds[s]),
                  cfg.sweep_grid[g]);
    report(buf);
  }, 0);

  double best = -1.0;
  for (std::size_t g = 0; g < cfg.sweep_grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t s = 0; s < seeds.size(); ++s) sum += out.records[g * seeds.size() + s].eval.success_rate();
    const double mean = seeds.empty() ? 0.0 : sum / static_cast<double>(seeds.size());
    out.mean_success.push_back(mean);
    if (mean > best) {
      best = mean;
      out.best_c_emp = cfg.sweep_grid[g];
    }
  }
  return out;
}

std::string format_sweep_row(const SweepRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%llu,%.17g,%d,%d,%.17g", static_cast<unsigned long long>(r.seed), r.c_emp,
                r.eval.episodes, r.eval.successes, r.eval.success_rate());
  return buf;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "seed,c_emp,episodes,successes,success_rate\n";
  for (const auto& rec : r.records) out << format_sweep_row(rec) << '\n';
  char buf[96];
  std::snprintf(buf, sizeof buf, "# best c_emp=%.17g pilot=%s", r.best_c_emp, r.pilot.c_str());
  out << buf << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace ave::harness
