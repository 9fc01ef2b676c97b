#include "ave/harness/study.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ave/errors.hpp"
#include "ave/harness/parallel.hpp"

namespace ave::harness {

using grid::Cell;
using grid::GridScenario;

namespace {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::gi_known: return "gi-known";
    case Method::gi_unknown: return "gi-unknown";
    case Method::empowerment: return "empowerment";
    case Method::proxy: return "proxy";
    case Method::oracle: return "oracle";
  }
  return "?";
}

std::string_view goal_set_name(GoalSet g) {
  switch (g) {
    case GoalSet::large: return "lg";
    case GoalSet::small: return "sg";
    case GoalSet::none: return "ng";
  }
  return "?";
}

bool is_goal_inference(Method m) { return m == Method::gi_known || m == Method::gi_unknown; }

std::vector<Cell> free_cells(const GridScenario& s) {
  std::vector<Cell> cells;
  for (int r = 0; r < s.height; ++r)
    for (int c = 0; c < s.width; ++c) {
      const Cell cell{r, c};
      if (s.is_free(cell)) cells.push_back(cell);
    }
  return cells;
}

Cell draw_cell(std::vector<Cell>& pool, SeededRng& rng) {
  const auto i = static_cast<std::size_t>(rng.below(pool.size()));
  const Cell c = pool[i];
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
  return c;
}

std::vector<Cell> candidate_goals(const GridScenario& s, const Condition& cond, SeededRng& rng) {
  std::vector<Cell> others = free_cells(s);
  std::erase(others, s.goal);
  std::vector<Cell> picked;
  const bool known = cond.method == Method::gi_known;
  if (cond.goal_set == GoalSet::large) {
    picked = others;
  } else {
    const int extra = known ? 1 : 2;
    for (int k = 0; k < extra && !others.empty(); ++k) picked.push_back(draw_cell(others, rng));
  }
  if (known) picked.push_back(s.goal);
  std::sort(picked.begin(), picked.end());
  return picked;
}

Bytes scenario_key(const GridScenario& s) {
  ByteWriter w;
  w.i32(s.human.row);
  w.i32(s.human.col);
  for (Cell b : s.blocks) {
    w.i32(b.row);
    w.i32(b.col);
  }
  return std::move(w).bytes();
}

}  // namespace

std::string Condition::label() const {
  return std::string(method_name(method)) + "/" + std::string(goal_set_name(goal_set));
}

Condition parse_condition(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) throw ConfigError("condition '" + std::string(text) + "' is not method/goal-set");
  const auto m = text.substr(0, slash);
  const auto g = text.substr(slash + 1);
  Condition c;
  if (m == "gi-known") c.method = Method::gi_known;
  else if (m == "gi-unknown") c.method = Method::gi_unknown;
  else if (m == "empowerment") c.method = Method::empowerment;
  else if (m == "proxy") c.method = Method::proxy;
  else if (m == "oracle") c.method = Method::oracle;
  else throw ConfigError("unknown assistant method '" + std::string(m) + "'");
  if (g == "lg") c.goal_set = GoalSet::large;
  else if (g == "sg") c.goal_set = GoalSet::small;
  else if (g == "ng") c.goal_set = GoalSet::none;
  else throw ConfigError("unknown goal set '" + std::string(g) + "'");
  if (is_goal_inference(c.method) == (c.goal_set == GoalSet::none))
    throw ConfigError("invalid condition pairing '" + std::string(text) +
                      "': goal inference needs lg or sg, other assistants take ng");
  return c;
}

GridScenario trial_scenario(const GridworldConfig& cfg, const std::string& scenario, std::uint64_t seed, int trial) {
  SeededRng rng(derive_seed(derive_seed(seed, fnv1a64(scenario)), static_cast<std::uint64_t>(trial)));
  GridScenario s;
  const Cell placeholder{0, 0};
  if (scenario == "corner") {
    const int corner = rng.uniform_int(4);
    s = grid::corner_trap(cfg.width, cfg.height, corner, placeholder);
  } else if (scenario == "center") {
    s = grid::center_trap(cfg.width, cfg.height, placeholder);
  } else {
    throw ConfigError("unknown trap scenario '" + scenario + "'");
  }
  s.timeout = cfg.timeout;
  std::vector<Cell> pool = free_cells(s);
  s.goal = draw_cell(pool, rng);
  s.validate();
  return s;
}

TrialRecord run_gridworld_trial(const GridworldConfig& cfg, const std::string& scenario, const Condition& cond,
                                std::uint64_t seed, int trial) {
  GridScenario s = trial_scenario(cfg, scenario, seed, trial);
  const SeededRng trial_rng(derive_seed(derive_seed(seed, fnv1a64(scenario) + 1), static_cast<std::uint64_t>(trial)));
  SeededRng goal_rng = trial_rng.fork(1);
  SeededRng agent_rng = trial_rng.fork(2);

  assist::GoalBelief belief;
  if (is_goal_inference(cond.method)) belief = assist::GoalBelief::uniform(candidate_goals(s, cond, goal_rng));

  // Exact empowerment and the oracle are functions of the layout alone, so
  // a repeated layout means the episode cycles until the timeout.
  const bool stationary = cond.method == Method::empowerment || cond.method == Method::oracle;
  std::set<Bytes> seen;

  TrialRecord rec{seed, trial, scenario, cond.label(), false, std::nullopt, "timeout"};
  for (int step = 0; step < s.timeout; ++step) {
    if (grid::reached_goal(s)) {
      rec.success = true;
      rec.steps_to_goal = step;
      rec.outcome = "success";
      return rec;
    }
    if (stationary && !seen.insert(scenario_key(s)).second) break;

    grid::AgentAction a;
    switch (cond.method) {
      case Method::gi_known:
      case Method::gi_unknown: a = assist::goal_inference_action(belief, s); break;
      case Method::empowerment: a = assist::empowerment_greedy_action(s, cfg.exact_query, agent_rng); break;
      case Method::proxy: a = assist::empowerment_greedy_action(s, cfg.proxy_query, agent_rng); break;
      case Method::oracle: a = assist::oracle_action(s, s.goal); break;
    }
    const GridScenario after = grid::apply_agent_action(s, a);
    const GridScenario next = grid::human_step(after);
    if (is_goal_inference(cond.method)) belief = assist::belief_update(belief, after, next.human, cfg.beta).belief;
    s = next;
  }
  if (grid::reached_goal(s)) {
    rec.success = true;
    rec.steps_to_goal = s.timeout;
    rec.outcome = "success";
  } else if (s.is_block(s.goal)) {
    rec.outcome = "blocked_goal";
  }
  return rec;
}

ConditionSummary summarize(const std::vector<TrialRecord>& trials, const std::string& scenario,
                           const std::string& condition) {
  ConditionSummary row{scenario, condition};
  long steps = 0;
  for (const auto& t : trials) {
    if (t.scenario != scenario || t.condition != condition) continue;
    ++row.trials;
    if (t.success) {
      ++row.successes;
      steps += *t.steps_to_goal;
    }
    if (t.outcome == "blocked_goal") ++row.blocked_goal;
  }
  if (row.trials > 0) row.success_rate = static_cast<double>(row.successes) / row.trials;
  if (row.successes > 0) row.mean_steps = static_cast<double>(steps) / row.successes;
  return row;
}

StudyResult run_gridworld_study(const GridworldConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  cfg.validate();
  if (seeds.empty()) throw ConfigError("gridworld study needs at least one seed");
  std::vector<Condition> conditions;
  for (const auto& c : cfg.conditions) conditions.push_back(parse_condition(c));
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t per_cell = seeds.size() * trials;
  const std::size_t per_scenario = conditions.size() * per_cell;

  StudyResult out;
  out.trials.resize(cfg.scenarios.size() * per_scenario);
  parallel_for(out.trials.size(), [&](std::size_t k) {
    const auto& scenario = cfg.scenarios[k / per_scenario];
    const auto& cond = conditions[(k % per_scenario) / per_cell];
    const auto seed = seeds[(k % per_cell) / trials];
    out.trials[k] = run_gridworld_trial(cfg, scenario, cond, seed, static_cast<int>(k % trials));
  });
  for (const auto& scenario : cfg.scenarios)
    for (const auto& cond : conditions) out.summary.push_back(summarize(out.trials, scenario, cond.label()));
  return out;
}

StudyResult run_gridworld_study(const GridworldConfig& cfg, std::uint64_t seed) {
  return run_gridworld_study(cfg, std::vector<std::uint64_t>{seed});
}

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& trials) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "seed,scenario,condition,trial,success,steps_to_goal,outcome\n";
  for (const auto& t : trials) out << format_trial_row(t) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

std::string format_trial_row(const TrialRecord& t) {
  std::ostringstream os;
  os << t.seed << ',' << t.scenario << ',' << t.condition << ',' << t.trial << ',' << (t.success ? 1 : 0) << ',';
  if (t.steps_to_goal) os << *t.steps_to_goal;
  os << ',' << t.outcome;
  return os.str();
}

std::string format_summary_csv_row(const ConditionSummary& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%.17g,%.17g,%d", r.scenario.c_str(), r.condition.c_str(), r.trials,
                r.successes, r.success_rate, r.mean_steps, r.blocked_goal);
  return buf;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<ConditionSummary>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "scenario,condition,trials,successes,success_rate,mean_steps,blocked_goal\n";
  for (const auto& r : rows) out << format_summary_csv_row(r) << '\n';
}

std::string format_table(const std::vector<ConditionSummary>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %-16s %9s %11s %12s\n", "scenario", "condition", "success", "mean steps",
                "blocked goal");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-8s %-16s %8.1f%% %11.2f %12d\n", r.scenario.c_str(), r.condition.c_str(),
                  100.0 * r.success_rate, r.mean_steps, r.blocked_goal);
    os << buf;
  }
  return os.str();
}

}  // namespace ave::harness
