#include "ave/learn/dqn.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>

#include "ave/errors.hpp"

namespace ave::learn {

emp::EmpowermentQuery RewardSpec::lander_bonus_query() {
  emp::EmpowermentQuery q;
  q.horizon = 15;
  q.n_rollouts = 10;
  q.selector = FeatureSelector::position;
  q.estimator = emp::Estimator::proxy;
  return q;
}

void RewardSpec::validate() const {
  if (!(c_emp >= 0.0)) throw ConfigError("c_emp must be >= 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  emp_query.validate();
}

void TrainSchedule::validate() const {
  if (episodes < 0 || max_steps < 1 || batch_size < 1 || target_sync_interval < 1 || hidden < 1 ||
      buffer_capacity < 1 || learning_starts < 0 || train_every < 1 || !(learning_rate > 0) ||
      !(grad_clip >= 0))
    throw ConfigError("invalid training schedule");
  for (double e : {epsilon_start, epsilon_end})
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(epsilon_decay_fraction >= 0.0)) throw ConfigError("epsilon decay fraction must be >= 0");
}

double TrainSchedule::epsilon(int episode) const {
  const double span = epsilon_decay_fraction * episodes;
  if (span <= 0.0) return epsilon_end;
  const double frac = std::min(1.0, episode / span);
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

double augmented_reward(double r_original, double emp_value, const RewardSpec& spec) {
  return r_original + spec.c_emp * emp_value;
}

double td_target(double reward, std::span<const double> next_obs, bool done, const ValueApproximator& target_q,
                 double gamma) {
  if (done) return reward;
  return reward + gamma * target_q.predict(next_obs).maxCoeff();
}

Eigen::VectorXd td_targets(const Batch& batch, const ValueApproximator& target_q, double gamma) {
  const Eigen::MatrixXd next_q = target_q.predict_batch(batch.next_obs);
  Eigen::VectorXd y = batch.rewards;
  for (Eigen::Index b = 0; b < y.size(); ++b)
    if (!batch.done[static_cast<std::size_t>(b)]) y(b) += gamma * next_q.col(b).maxCoeff();
  return y;
}

double train_step(ValueApproximator& q, const ValueApproximator& target_q, const Batch& batch, double gamma,
                  Adam& optimizer, double grad_clip) {
  if (batch.size() < 1) throw ContractViolation("empty batch");
  const Eigen::VectorXd y = td_targets(batch, target_q, gamma);
  std::vector<double> grad;
  const double loss = q.loss_and_gradient(batch.obs, batch.actions, y, grad);
  if (!std::isfinite(loss)) throw DivergenceError("non-finite TD loss");
  if (grad_clip > 0.0) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > grad_clip)
      for (double& g : grad) g *= grad_clip / norm;
  }
  optimizer.step(q.parameters(), grad);
  return loss;
}

int greedy_action(const ValueApproximator& q, std::span<const double> obs) {
  Eigen::Index best = 0;
  q.predict(obs).maxCoeff(&best);
  return static_cast<int>(best);
}

DqnLearner::DqnLearner(ValueApproximator init, const TrainSchedule& schedule, double gamma, int obs_dim,
                       SeededRng replay_rng)
    : q_(std::move(init)),
      target_(q_),
      adam_(schedule.learning_rate),
      buffer_(schedule.buffer_capacity, obs_dim),
      schedule_(schedule),
      gamma_(gamma),
      replay_rng_(std::move(replay_rng)) {}

void DqnLearner::store(std::span<const double> obs, int action, double reward, std::span<const double> next_obs,
                       bool done) {
  buffer_.push(obs, action, reward, next_obs, done);
}

bool DqnLearner::ready() const {
  return buffer_.size() >= static_cast<std::size_t>(std::max(schedule_.batch_size, schedule_.learning_starts));
}

double DqnLearner::learn() {
  const Batch batch = buffer_.sample(static_cast<std::size_t>(schedule_.batch_size), replay_rng_);
  const double loss = train_step(q_, target_, batch, gamma_, adam_, schedule_.grad_clip);
  if (++steps_ % schedule_.target_sync_interval == 0) target_ = q_;
  return loss;
}

Bytes encode_checkpoint(const ValueApproximator& net) {
  ByteWriter w;
  for (char c : {'A', 'V', 'E', 'Q'}) w.u8(static_cast<std::uint8_t>(c));
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(net.input_dim()));
  w.u32(static_cast<std::uint32_t>(net.hidden()));
  w.u32(static_cast<std::uint32_t>(net.outputs()));
  w.u64(net.parameter_count());
  for (double p : net.parameters()) w.f64(p);
  return std::move(w).bytes();
}

ValueApproximator decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  for (char c : {'A', 'V', 'E', 'Q'})
    if (r.u8() != static_cast<std::uint8_t>(c)) throw IoError("not an ave checkpoint");
  if (r.u32() != 1) throw IoError("unsupported checkpoint version");
  const auto input = static_cast<int>(r.u32());
  const auto hidden = static_cast<int>(r.u32());
  const auto outputs = static_cast<int>(r.u32());
  SeededRng unused(0);
  ValueApproximator net(input, hidden, outputs, unused);
  if (r.u64() != net.parameter_count()) throw IoError("checkpoint parameter count mismatch");
  std::vector<double> params(net.parameter_count());
  for (double& p : params) p = r.f64();
  if (!r.done()) throw IoError("trailing bytes in checkpoint");
  net.set_parameters(params);
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const ValueApproximator& net) {
  const Bytes bytes = encode_checkpoint(net);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write checkpoint " + path.string());
}

ValueApproximator load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<EpisodeLog>& curve) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "episode,return,success,loss,mean_bonus\n" << std::setprecision(17);
  for (const auto& e : curve)
    out << e.episode << ',' << e.ret << ',' << (e.success ? 1 : 0) << ',' << e.loss << ',' << e.mean_bonus << '\n';
}

}  // namespace ave::learn
