#include "ave/bridge/session.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "ave/errors.hpp"
#include "ave/serial.hpp"

namespace ave::bridge {

using Clock = std::chrono::steady_clock;

void SessionOptions::validate() const {
  if (mode != "play" && mode != "finetune") throw ConfigError("session mode must be play or finetune");
  if (condition != "empowerment" && condition != "baseline")
    throw ConfigError("session condition must be empowerment or baseline");
  if (tick_hz < 1) throw ConfigError("tick_hz must be >= 1");
  if (bonus_lag < 0 || bonus_lag > 3) throw ConfigError("bonus_lag must lie in [0, 3]");
  if (!(train_budget > 0.0 && train_budget <= 1.0)) throw ConfigError("train_budget must lie in (0, 1]");
  if (max_backlog < 1) throw ConfigError("max_backlog must be >= 1");
  physics.validate();
  copilot.validate();
  reward.validate();
  schedule.validate();
}

SessionOptions make_session_options(const harness::ExperimentConfig& cfg, const std::string& session_id) {
  SessionOptions o;
  o.session_id = session_id;
  o.mode = cfg.serve.mode;
  o.condition = cfg.serve.condition;
  o.physics = cfg.lander.physics;
  o.copilot = cfg.lander.copilot;
  o.reward = cfg.lander.reward;
  if (o.condition == "baseline") o.reward.c_emp = 0.0;
  o.schedule = cfg.lander.copilot_schedule;
  o.tick_hz = cfg.serve.tick_hz;
  o.bonus_lag = cfg.serve.bonus_lag;
  o.train_budget = cfg.serve.train_budget;
  o.max_backlog = cfg.serve.max_backlog;
  o.seed = derive_seed(cfg.seeds.empty() ? 1 : cfg.seeds.front(), fnv1a64(session_id));
  if (o.mode == "finetune") o.checkpoint_dir = cfg.serve.log_dir;
  return o;
}

// ---------------------------------------------------------------- BonusWorker

BonusWorker::BonusWorker(lander::LanderParams params, emp::EmpowermentQuery query, bool threaded)
    : env_(params), query_(std::move(query)), threaded_(threaded) {
  query_.validate();
  if (threaded_) thread_ = std::thread([this] { loop(); });
}

BonusWorker::~BonusWorker() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

double BonusWorker::compute(const Job& job) const {
  SeededRng rng(job.seed);
  return emp::diversity_bonus(env_, job.state, query_, rng);
}

void BonusWorker::submit(std::uint64_t tick, const lander::LanderState& s, std::uint64_t seed) {
  Job job{tick, s, seed};
  if (!threaded_) {
    const double v = compute(job);
    std::lock_guard lock(mu_);
    done_[tick] = v;
    return;
  }
  {
    std::lock_guard lock(mu_);
    jobs_.push_back(job);
  }
  cv_.notify_all();
}

void BonusWorker::loop() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [&] { return stop_ || !jobs_.empty(); });
    if (stop_) return;
    const Job job = jobs_.front();
    jobs_.pop_front();
    lock.unlock();
    const double v = compute(job);
    lock.lock();
    done_[job.tick] = v;
    cv_.notify_all();
  }
}

double BonusWorker::wait(std::uint64_t tick) {
  std::unique_lock lock(mu_);
  const auto ready = [&] { return done_.contains(tick); };
  if (!ready()) {
    const bool queued = std::any_of(jobs_.begin(), jobs_.end(), [&](const Job& j) { return j.tick == tick; });
    if (!queued && !threaded_) throw ContractViolation("bonus for tick " + std::to_string(tick) + " was never submitted");
    cv_.wait(lock, [&] { return ready() || stop_; });
    if (!ready()) throw ContractViolation("bonus worker stopped");
  }
  return done_.at(tick);
}

void BonusWorker::discard_before(std::uint64_t tick) {
  std::lock_guard lock(mu_);
  done_.erase(done_.begin(), done_.lower_bound(tick));
}

// -------------------------------------------------------------------- Session

Session::Session(SessionOptions options, learn::ValueApproximator copilot)
    : options_((options.validate(), std::move(options))),
      env_(options_.physics),
      net_(std::move(copilot)),
      bonus_(options_.physics, options_.reward.emp_query, options_.threaded_bonus),
      reset_rng_(SeededRng(options_.seed).fork(1)),
      memory_(static_cast<std::size_t>(options_.copilot.memory_len)) {
  if (net_.input_dim() != lander::kCopilotObsDims || net_.outputs() != lander::LanderAction::kCount)
    throw ConfigError("copilot checkpoint has the wrong shape for the lander");
  if (options_.mode == "finetune")
    learner_.emplace(net_, options_.schedule, options_.reward.gamma, lander::kCopilotObsDims,
                     SeededRng(options_.seed).fork(2));
  state_ = lander::reset(options_.physics, reset_rng_);
}

Session::~Session() { flush(); }

void Session::flush() {
  for (auto& f : saves_) f.get();
  saves_.clear();
}

const learn::ValueApproximator& Session::copilot() const { return learner_ ? learner_->online() : net_; }

Hello Session::hello() const { return Hello{kProtoVersion, options_.session_id}; }

ConfigMsg Session::config() const {
  return ConfigMsg{options_.condition, options_.copilot.alpha, options_.reward.c_emp, options_.physics.dt,
                   options_.tick_hz};
}

void Session::finalize_ready(std::uint64_t upto) {
  while (!pending_.empty()) {
    auto& p = pending_.front();
    if (p.tick > upto || !(p.next_obs || p.done)) break;
    const double r = learn::augmented_reward(p.reward, bonus_.wait(p.tick), options_.reward);
    learner_->store(p.obs, p.action, r, p.next_obs ? *p.next_obs : p.obs, p.done);
    pending_.pop_front();
  }
}

void Session::end_episode(TickResult& out) {
  if (learner_) finalize_ready(std::numeric_limits<std::uint64_t>::max());
  const auto outcome = lander::classify_outcome(state_, options_.physics);
  const bool success = outcome == lander::Outcome::landed_at_goal;
  ++stats_.episodes;
  if (success) ++stats_.successes;
  out.episode_end = EpisodeEnd{episode_, outcome ? std::string(lander::to_string(*outcome)) : "truncated", score_,
                               static_cast<double>(stats_.successes) / stats_.episodes};

  if (learner_ && !options_.checkpoint_dir.empty()) {
    const auto path =
        options_.checkpoint_dir / (options_.session_id + "-ep" + std::to_string(episode_) + ".aveq");
    learn::ValueApproximator snapshot = learner_->online();
    saves_.push_back(std::async(std::launch::async, [path, snapshot = std::move(snapshot)] {
      std::filesystem::create_directories(path.parent_path());
      learn::save_checkpoint(path, snapshot);
    }));
    ++stats_.checkpoints;
  }

  state_ = lander::reset(options_.physics, reset_rng_);
  memory_.clear();
  latched_.reset();
  score_ = 0.0;
  episode_steps_ = 0;
  ++episode_;
  episode_start_ = tick_;
}

void Session::maybe_train(TickResult& out, std::optional<bool> force, double elapsed_ms) {
  if (!learner_) return;
  if (env_steps_ % static_cast<std::uint64_t>(options_.schedule.train_every) == 0 && learner_->ready()) ++owed_steps_;
  if (owed_steps_ > options_.max_backlog) {
    stats_.dropped_steps += static_cast<std::uint64_t>(owed_steps_ - options_.max_backlog);
    owed_steps_ = options_.max_backlog;
  }
  if (owed_steps_ == 0) return;
  const double budget_ms = 1000.0 / options_.tick_hz * options_.train_budget;
  const bool run = force ? *force : elapsed_ms + step_ms_estimate_ <= budget_ms;
  if (!run) {
    ++stats_.deferred_steps;
    return;
  }
  const auto t0 = Clock::now();
  learner_->learn();
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  step_ms_estimate_ = step_ms_estimate_ == 0.0 ? ms : 0.8 * step_ms_estimate_ + 0.2 * ms;
  --owed_steps_;
  ++stats_.train_steps;
  out.trained = true;
}

Session::TickResult Session::tick(std::optional<ActionId> input, std::optional<bool> force_train) {
  const auto t0 = Clock::now();
  TickResult out;
  if (env_.is_terminal(state_)) end_episode(out);
  if (input) {
    if (input->index < 0 || input->index >= lander::LanderAction::kCount)
      throw ProtocolError("action index out of range");
    latched_ = input;
  }
  out.input = latched_;

  const ActionId user = latched_.value_or(lander::kAllOff);
  learn::CopilotDecision d = learn::copilot_decide(copilot(), state_, memory_, user, options_.copilot);
  const ActionId executed = d.intervention.executed;
  const auto step = env_.step(state_, executed);
  const std::uint64_t now = tick_;
  bonus_.submit(now, step.next_state, derive_seed(options_.seed, now));

  if (learner_) {
    if (!pending_.empty() && !pending_.back().next_obs && !pending_.back().done) pending_.back().next_obs = d.obs;
    pending_.push_back(Pending{now, d.obs, executed.index, step.reward, std::nullopt, step.done});
  }

  state_ = step.next_state;
  score_ += step.reward;
  ++episode_steps_;
  ++env_steps_;

  const auto lag = static_cast<std::uint64_t>(options_.bonus_lag);
  const std::uint64_t target = std::max(episode_start_, now >= lag ? now - lag : 0);
  const double bonus = bonus_.wait(target);
  stats_.max_bonus_staleness = std::max(stats_.max_bonus_staleness, static_cast<int>(now - target));
  if (learner_) finalize_ready(target);
  bonus_.discard_before(pending_.empty() ? target : std::min(target, pending_.front().tick));

  maybe_train(out, force_train, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());

  Frame& f = out.frame;
  f.seq = ++seq_;
  f.t = episode_steps_ * options_.physics.dt;
  f.x = state_.x;
  f.y = state_.y;
  f.vx = state_.vx;
  f.vy = state_.vy;
  f.theta = state_.theta;
  f.omega = state_.omega;
  f.left_contact = state_.left_contact;
  f.right_contact = state_.right_contact;
  f.goal_x = state_.goal_x;
  f.user_action = user.index;
  f.executed_action = executed.index;
  f.intervened = d.intervention.intervened;
  f.emp_bonus = bonus;
  f.episode = episode_;
  f.score = score_;

  ++tick_;
  ++stats_.ticks;
  return out;
}

}  // namespace ave::bridge
