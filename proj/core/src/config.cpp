#include "ave/harness/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "ave/errors.hpp"

namespace ave::harness {

using nlohmann::json;

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "gridworld") return ExperimentKind::gridworld;
  if (name == "lander-train") return ExperimentKind::lander_train;
  if (name == "lander-eval") return ExperimentKind::lander_eval;
  if (name == "sweep") return ExperimentKind::sweep;
  if (name == "pendulum-landscape") return ExperimentKind::pendulum_landscape;
  if (name == "serve") return ExperimentKind::serve;
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::gridworld: return "gridworld";
    case ExperimentKind::lander_train: return "lander-train";
    case ExperimentKind::lander_eval: return "lander-eval";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::pendulum_landscape: return "pendulum-landscape";
    case ExperimentKind::serve: return "serve";
  }
  return "?";
}

Preset parse_preset(std::string_view name) {
  if (name == "quick") return Preset::quick;
  if (name == "paper") return Preset::paper;
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected quick or paper)");
}

std::string_view to_string(Preset preset) { return preset == Preset::quick ? "quick" : "paper"; }

emp::EmpowermentQuery GridworldConfig::default_exact_query() {
  emp::EmpowermentQuery q;
  q.horizon = 3;
  q.estimator = emp::Estimator::exact;
  q.selector = FeatureSelector::human_cell;
  return q;
}

emp::EmpowermentQuery GridworldConfig::default_proxy_query() {
  emp::EmpowermentQuery q = default_exact_query();
  q.estimator = emp::Estimator::proxy;
  q.n_rollouts = 100;
  return q;
}

void GridworldConfig::validate() const {
  if (width < 3 || height < 3) throw ConfigError("gridworld needs at least 3x3 cells");
  if (timeout < 1 || trials < 1) throw ConfigError("gridworld timeout and trials must be >= 1");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (scenarios.empty() || conditions.empty()) throw ConfigError("gridworld study needs scenarios and conditions");
  for (const auto& s : scenarios)
    if (s != "corner" && s != "center") throw ConfigError("unknown trap scenario '" + s + "'");
  exact_query.validate();
  proxy_query.validate();
}

learn::TrainSchedule LanderConfig::default_copilot_schedule() {
  learn::TrainSchedule s;
  s.learning_rate = 3e-4;
  return s;
}

assist::PilotConfig LanderConfig::pilot_config(assist::PilotKind kind) const {
  return assist::PilotConfig{kind, lag_prob, noise_prob};
}

void LanderConfig::validate() const {
  physics.validate();
  pilot_schedule.validate();
  copilot_schedule.validate();
  reward.validate();
  copilot.validate();
  pilot_config(assist::PilotKind::optimal).validate();
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (!(pilot_gamma >= 0.0 && pilot_gamma < 1.0)) throw ConfigError("pilot_gamma must lie in [0, 1)");
  for (const auto& p : pilots) {
    const auto kind = assist::parse_pilot_kind(p);
    if (kind == assist::PilotKind::human) throw ConfigError("the human pilot cannot be simulated");
  }
  assist::parse_pilot_kind(sweep_pilot);
  if (sweep_grid.empty()) throw ConfigError("sweep grid is empty");
  for (double c : sweep_grid)
    if (!(c >= 0.0)) throw ConfigError("sweep values must be >= 0");
}

emp::EmpowermentQuery LandscapeConfig::default_query() {
  emp::EmpowermentQuery q;
  q.horizon = 200;
  q.n_rollouts = 64;
  q.estimator = emp::Estimator::proxy;
  q.selector = FeatureSelector::phase_embedding;
  return q;
}

void LandscapeConfig::validate() const {
  params.validate();
  if (theta_bins < 8 || omega_bins < 8) throw ConfigError("landscape needs at least 8 bins per axis");
  if (!(omega_extent > 0.0)) throw ConfigError("omega_extent must be positive");
  query.validate();
  if (query.estimator != emp::Estimator::proxy) throw ConfigError("the landscape uses the proxy estimator");
}

void ServeConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  if (mode != "play" && mode != "finetune") throw ConfigError("serve mode must be play or finetune");
  if (condition != "empowerment" && condition != "baseline") throw ConfigError("condition must be empowerment or baseline");
  if (tick_hz < 1) throw ConfigError("tick_hz must be >= 1");
  if (bonus_lag < 0 || bonus_lag > 3) throw ConfigError("bonus_lag must lie in [0, 3]");
  if (!(train_budget > 0.0 && train_budget <= 1.0)) throw ConfigError("train_budget must lie in (0, 1]");
  if (max_backlog < 1) throw ConfigError("max_backlog must be >= 1");
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  switch (kind) {
    case ExperimentKind::gridworld: gridworld.validate(); break;
    case ExperimentKind::lander_train:
    case ExperimentKind::lander_eval:
    case ExperimentKind::sweep: lander.validate(); break;
    case ExperimentKind::pendulum_landscape: landscape.validate(); break;
    case ExperimentKind::serve:
      serve.validate();
      lander.validate();
      break;
  }
}

ExperimentConfig default_config(ExperimentKind kind, Preset preset) {
  ExperimentConfig c;
  c.kind = kind;
  c.preset = preset;
  c.out = "runs/" + std::string(to_string(kind));
  const int episodes = preset == Preset::quick ? 150 : 500;
  c.lander.pilot_schedule.episodes = episodes;
  c.lander.copilot_schedule.episodes = episodes;
  if (preset == Preset::quick) {
    c.seeds = {1, 2, 3};
  } else {
    c.seeds.clear();
    for (std::uint64_t s = 1; s <= 10; ++s) c.seeds.push_back(s);
  }
  return c;
}

// ------------------------------------------------------------- field tables

namespace {

std::string_view to_string(emp::LogBase b) { return b == emp::LogBase::e ? "e" : "2"; }
std::string_view to_string(emp::VarianceMode m) {
  return m == emp::VarianceMode::per_dimension ? "per-dimension" : "flattened";
}
std::string_view to_string(TerminalPolicy t) { return t == TerminalPolicy::absorb ? "absorb" : "drop"; }
TerminalPolicy parse_terminal(std::string_view s) {
  if (s == "absorb") return TerminalPolicy::absorb;
  if (s == "drop") return TerminalPolicy::drop;
  throw ConfigError("unknown terminal policy '" + std::string(s) + "'");
}

template <class V>
void fields(V& v, emp::EmpowermentQuery& q) {
  v("horizon", q.horizon);
  v("n_rollouts", q.n_rollouts);
  v("selector", q.selector);
  v("log_base", q.log_base);
  v("estimator", q.estimator);
  v("terminal", q.terminal);
  v("enumeration_cap", q.enumeration_cap);
  v("allow_sampling", q.allow_sampling);
  v("variance", q.variance);
}

template <class V>
void fields(V& v, GridworldConfig& g) {
  v("width", g.width);
  v("height", g.height);
  v("timeout", g.timeout);
  v("trials", g.trials);
  v("beta", g.beta);
  v("scenarios", g.scenarios);
  v("conditions", g.conditions);
  v("exact_query", g.exact_query);
  v("proxy_query", g.proxy_query);
}

template <class V>
void fields(V& v, lander::LanderParams& p) {
  v("dt", p.dt);
  v("max_steps", p.max_steps);
  v("gravity", p.gravity);
  v("main_accel", p.main_accel);
  v("lateral_accel", p.lateral_accel);
  v("lateral_torque", p.lateral_torque);
  v("righting", p.righting);
  v("angular_damping", p.angular_damping);
  v("drag", p.drag);
  v("leg_half_span", p.leg_half_span);
  v("v_land", p.v_land);
  v("theta_land", p.theta_land);
  v("pad_halfwidth", p.pad_halfwidth);
  v("start_y", p.start_y);
  v("start_x_range", p.start_x_range);
  v("start_v_range", p.start_v_range);
  v("goal_range", p.goal_range);
  v("reward_goal", p.reward_goal);
  v("reward_landed", p.reward_landed);
  v("reward_crash", p.reward_crash);
  v("reward_timeout", p.reward_timeout);
  v("shaping", p.shaping);
  v("progress_scale", p.progress_scale);
}

template <class V>
void fields(V& v, learn::TrainSchedule& s) {
  v("episodes", s.episodes);
  v("max_steps", s.max_steps);
  v("epsilon_start", s.epsilon_start);
  v("epsilon_end", s.epsilon_end);
  v("epsilon_decay_fraction", s.epsilon_decay_fraction);
  v("target_sync_interval", s.target_sync_interval);
  v("batch_size", s.batch_size);
  v("learning_rate", s.learning_rate);
  v("hidden", s.hidden);
  v("buffer_capacity", s.buffer_capacity);
  v("learning_starts", s.learning_starts);
  v("train_every", s.train_every);
  v("grad_clip", s.grad_clip);
}

template <class V>
void fields(V& v, learn::RewardSpec& r) {
  v("c_emp", r.c_emp);
  v("gamma", r.gamma);
  v("emp_query", r.emp_query);
}

template <class V>
void fields(V& v, assist::CopilotConfig& c) {
  v("alpha", c.alpha);
  v("memory_len", c.memory_len);
}

template <class V>
void fields(V& v, LanderConfig& l) {
  v("physics", l.physics);
  v("pilot_schedule", l.pilot_schedule);
  v("copilot_schedule", l.copilot_schedule);
  v("pilot_gamma", l.pilot_gamma);
  v("reward", l.reward);
  v("copilot", l.copilot);
  v("lag_prob", l.lag_prob);
  v("noise_prob", l.noise_prob);
  v("eval_episodes", l.eval_episodes);
  v("pilots", l.pilots);
  v("sweep_pilot", l.sweep_pilot);
  v("sweep_grid", l.sweep_grid);
  v("checkpoints", l.checkpoints);
}

template <class V>
void fields(V& v, pendulum::PendulumParams& p) {
  v("mass", p.mass);
  v("length", p.length);
  v("gravity", p.gravity);
  v("damping", p.damping);
  v("torque_fraction", p.torque_fraction);
  v("dt", p.dt);
  v("substeps", p.substeps);
}

template <class V>
void fields(V& v, LandscapeConfig& l) {
  v("params", l.params);
  v("theta_bins", l.theta_bins);
  v("omega_bins", l.omega_bins);
  v("omega_extent", l.omega_extent);
  v("query", l.query);
}

template <class V>
void fields(V& v, ServeConfig& s) {
  v("port", s.port);
  v("copilot_checkpoint", s.copilot_checkpoint);
  v("mode", s.mode);
  v("condition", s.condition);
  v("tick_hz", s.tick_hz);
  v("log_dir", s.log_dir);
  v("bonus_lag", s.bonus_lag);
  v("train_budget", s.train_budget);
  v("max_backlog", s.max_backlog);
}

template <class V>
void fields(V& v, ExperimentConfig& c) {
  v("kind", c.kind);
  v("preset", c.preset);
  v("seeds", c.seeds);
  v("out", c.out);
  v("gridworld", c.gridworld);
  v("lander", c.lander);
  v("landscape", c.landscape);
  v("serve", c.serve);
}

struct Dump;
struct Load;

template <class T>
concept Record = requires(Dump& d, T& t) { fields(d, t); };

template <class T>
json leaf_to_json(const T& v) {
  if constexpr (std::is_enum_v<T>)
    return std::string(to_string(v));
  else
    return v;
}

struct Dump {
  json j = json::object();
  template <class T>
  void operator()(const char* key, T& value) {
    if constexpr (Record<T>) {
      Dump inner;
      fields(inner, value);
      j[key] = std::move(inner.j);
    } else {
      j[key] = leaf_to_json(value);
    }
  }
};

template <class T>
void parse_enum(const std::string& s, T& out) {
  if constexpr (std::is_same_v<T, FeatureSelector>) out = parse_feature_selector(s);
  else if constexpr (std::is_same_v<T, emp::LogBase>) out = emp::parse_log_base(s);
  else if constexpr (std::is_same_v<T, emp::Estimator>) out = emp::parse_estimator(s);
  else if constexpr (std::is_same_v<T, emp::VarianceMode>) out = emp::parse_variance_mode(s);
  else if constexpr (std::is_same_v<T, TerminalPolicy>) out = parse_terminal(s);
  else if constexpr (std::is_same_v<T, ExperimentKind>) out = parse_experiment_kind(s);
  else if constexpr (std::is_same_v<T, Preset>) out = parse_preset(s);
  else static_assert(sizeof(T) == 0, "no parser for enum");
}

struct Load {
  const json& j;
  std::string path;
  std::set<std::string> known;

  template <class T>
  void operator()(const char* key, T& value) {
    known.insert(key);
    const auto it = j.find(key);
    if (it == j.end()) return;
    const std::string where = path.empty() ? key : path + "." + key;
    if constexpr (Record<T>) {
      if (!it->is_object()) throw ConfigError(where + ": expected an object");
      Load inner{*it, where, {}};
      fields(inner, value);
      inner.finish();
    } else {
      try {
        if constexpr (std::is_enum_v<T>) {
          parse_enum(it->template get<std::string>(), value);
        } else if constexpr (std::is_same_v<T, double>) {
          if (!it->is_number()) throw ConfigError("expected a number");
          value = it->template get<double>();
        } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
          if (!it->is_number_integer()) throw ConfigError("expected an integer");
          value = it->template get<T>();
        } else if constexpr (std::is_same_v<T, bool>) {
          if (!it->is_boolean()) throw ConfigError("expected true or false");
          value = it->template get<bool>();
        } else {
          value = it->template get<T>();
        }
      } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
  }

  void finish() const {
    for (const auto& [k, _] : j.items())
      if (!known.contains(k)) throw ConfigError("unknown config key '" + (path.empty() ? k : path + "." + k) + "'");
  }
};

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig base, const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  Load load{j, "", {}};
  fields(load, base);
  load.finish();
  return base;
}

json to_json(const ExperimentConfig& c) {
  ExperimentConfig copy = c;
  Dump d;
  fields(d, copy);
  return d.j;
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
  return buf;
}

ExperimentConfig load_config(const std::string& path, ExperimentKind kind, Preset preset) {
  ExperimentConfig base = default_config(kind, preset);
  if (path.empty()) return base;
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  auto c = apply_overrides(std::move(base), j);
  c.kind = kind;
  return c;
}

}  // namespace ave::harness
